"""Dense complex linear algebra helpers.

Matrices and vectors are plain ``numpy`` complex arrays. Tensor factors are
ordered as listed, the first factor being the most significant digit of a
mixed-radix basis index (the same convention as ``numpy.kron``).
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

UNITARY_TOL = 1e-10


def _as_matrix(m, name: str = "matrix") -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} has non-finite entries")
    return m


def kron(a, b) -> np.ndarray:
    """Kronecker product, ``(a⊗b)[i*rb + k, j*cb + l] = a[i, j] * b[k, l]``."""
    return np.kron(_as_matrix(a, "a"), _as_matrix(b, "b"))


def kron_all(factors: Iterable) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        f = np.asarray(f, dtype=complex)
        out = np.kron(out, f if f.ndim == 2 else f.reshape(-1, 1))
    return out


def partial_trace(rho, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduce ``rho`` onto the factors listed in ``keep``.

    Kept factors appear in their original order regardless of the order of
    ``keep``.
    """
    rho = _as_matrix(rho, "rho")
    dims = tuple(int(x) for x in dims)
    if any(x < 1 for x in dims):
        raise ValueError(f"tensor dims must be positive, got {dims}")
    total = int(np.prod(dims)) if dims else 1
    if rho.shape != (total, total):
        raise ValueError(f"rho has shape {rho.shape}, dims {dims} need ({total}, {total})")
    keep = sorted(set(int(k) for k in keep))
    for k in keep:
        if not 0 <= k < len(dims):
            raise ValueError(f"keep index {k} out of range for {len(dims)} factors")

    nf = len(dims)
    traced = [i for i in range(nf) if i not in keep]
    t = rho.reshape(dims + dims)
    # Move to (kept..., traced..., kept'..., traced'...) and contract traced pairs.
    perm = keep + traced + [nf + i for i in keep] + [nf + i for i in traced]
    t = t.transpose(perm)
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    dt = int(np.prod([dims[i] for i in traced])) if traced else 1
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def max_entangled(d: int) -> np.ndarray:
    """``(1/sqrt(d)) * sum_i |i>|i>`` as a length ``d*d`` vector."""
    if d < 1:
        raise ValueError(f"dimension must be positive, got {d}")
    return np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)


def choi_vector(x) -> np.ndarray:
    """Vectorisation ``(1/sqrt(d)) * sum_ij x[i,j] |i>|j>`` of a square matrix."""
    x = _as_matrix(x, "x")
    if x.shape[0] != x.shape[1]:
        raise ValueError(f"choi_vector needs a square matrix, got shape {x.shape}")
    return x.reshape(-1) / np.sqrt(x.shape[0])


def entangler(d: int) -> np.ndarray:
    """A real orthogonal ``d²×d²`` matrix sending ``|0>|0>`` to ``max_entangled(d)``.

    Built as the Householder reflection exchanging the two vectors, so it is
    symmetric, involutive and has a bit-exact JSON representation.
    """
    phi = max_entangled(d).real
    e0 = np.zeros(d * d)
    e0[0] = 1.0
    w = e0 - phi
    nw = w @ w
    if nw == 0.0:
        return np.eye(d * d, dtype=complex)
    return (np.eye(d * d) - 2.0 * np.outer(w, w) / nw).astype(complex)


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    if not np.all(np.isfinite(m)):
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def unitary_eig(u, tol: float = UNITARY_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and orthonormal eigenvectors (as columns) of a unitary.

    Uses the complex Schur form, which for a normal matrix is diagonal, so
    degenerate eigenspaces still come with an orthonormal basis.
    """
    u = _as_matrix(u, "u")
    if not is_unitary(u, tol):
        raise ValueError("unitary_eig: input is not unitary")
    t, z = scipy.linalg.schur(u, output="complex")
    lam = np.diag(t).copy()
    lam /= np.abs(lam)
    return lam, z


def hermitian_part(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    return (m + m.conj().T) / 2


def trace_distance(rho, sigma) -> float:
    """``(1/2) * ||rho - sigma||_1`` for Hermitian arguments."""
    rho = _as_matrix(rho, "rho")
    sigma = _as_matrix(sigma, "sigma")
    if rho.shape != sigma.shape or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"trace_distance: shapes {rho.shape} and {sigma.shape} differ or are not square")
    ev = np.linalg.eigvalsh(hermitian_part(rho - sigma))
    return float(0.5 * np.sum(np.abs(ev)))


def matrix_power(u, k: int) -> np.ndarray:
    """Integer power of a unitary; negative powers go through the adjoint."""
    u = np.asarray(u, dtype=complex)
    if k < 0:
        return np.linalg.matrix_power(u.conj().T, -k)
    return np.linalg.matrix_power(u, k)
