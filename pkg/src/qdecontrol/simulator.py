"""Exact dense simulation of circuits under a concrete oracle.

Besides plain evaluation this module provides the two reference quantities a
decontrolled circuit is compared against: the uniform average over a finite
phase group, and the mixture over inverse eigenphases of the oracle. It also
exposes the control-bit path decomposition of an output state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .circuit import Adder, Circuit, CSwap, Gate, OracleCall, Register, apply_variant, ensure_valid, sigma
from .linalg import UNITARY_TOL, hermitian_part, is_unitary, unitary_eig


@dataclass(frozen=True, eq=False)
class OracleBinding:
    """Concrete unitary ``u`` with a unit phase; queries apply ``phase * u``."""

    u: np.ndarray
    phase: complex = 1.0

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"oracle matrix must be square, got shape {u.shape}")
        if not is_unitary(u, UNITARY_TOL):
            raise ValueError("oracle matrix is not unitary within 1e-10")
        if abs(abs(self.phase) - 1.0) > 1e-12:
            raise ValueError(f"oracle phase {self.phase!r} does not have unit modulus")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "phase", complex(self.phase))

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    def matrix(self) -> np.ndarray:
        return self.phase * self.u


@dataclass(frozen=True)
class PhaseGroup:
    """The cyclic group of ``q``-th roots of unity."""

    q: int

    def __post_init__(self):
        if int(self.q) != self.q or self.q < 1:
            raise ValueError(f"phase group order must be a positive integer, got {self.q!r}")

    def elements(self) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(self.q) / self.q)


@dataclass(frozen=True, eq=False)
class DensityState:
    """Reduced density matrix over ``registers`` (the untraced ones, in layout order)."""

    registers: tuple[Register, ...]
    matrix: np.ndarray

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.dim for r in self.registers)

    def marginal(self, name: str) -> np.ndarray:
        """Computational-basis distribution of one kept register."""
        names = [r.name for r in self.registers]
        i = names.index(name)
        diag = np.real(np.diag(self.matrix)).reshape(self.dims) if self.registers else np.real(np.diag(self.matrix))
        axes = tuple(j for j in range(len(names)) if j != i)
        return diag.sum(axis=axes)

    def check(self, tol: float = 1e-10) -> None:
        m = self.matrix
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(m) - 1) > tol:
            raise ValueError(f"density matrix has trace {np.trace(m)}")
        if np.min(np.linalg.eigvalsh(hermitian_part(m))) < -1e-9:
            raise ValueError("density matrix is not positive semidefinite")


# --- tensor kernels --------------------------------------------------------

def _apply(state: np.ndarray, m: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """Apply ``m`` to the tensor factors ``axes`` (in that order) of ``state``."""
    k = len(axes)
    if k == 0:
        return m[0, 0] * state
    sub = [state.shape[a] for a in axes]
    mt = m.reshape(sub + sub)
    out = np.tensordot(mt, state, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def _slice(ndim: int, axis: int, value: int) -> tuple:
    idx = [slice(None)] * ndim
    idx[axis] = value
    return tuple(idx)


def _controlled(state: np.ndarray, control: int, fn) -> np.ndarray:
    """Apply ``fn`` (a map on the control=1 sub-tensor) conditioned on the control axis."""
    out = state.copy()
    sl = _slice(state.ndim, control, 1)
    out[sl] = fn(state[sl])
    return out


def _shifted(axis: int, removed: int) -> int:
    return axis if axis < removed else axis - 1


def _oracle_axis(c: Circuit, op: OracleCall) -> int:
    return c.layout.index(c.layout.role_register(op.target).name)


def _evolve(c: Circuit, u: Optional[np.ndarray], phase: complex, bits: Optional[Sequence[int]] = None) -> np.ndarray:
    """Run the op list on ``|0...0>``.

    With ``bits`` given, the i-th controlled oracle call is replaced by the
    projector ``|b_i><b_i|`` on its control, times ``u^variant`` on the target
    when ``b_i = 1``.
    """
    layout = c.layout
    dims = layout.dims
    state = np.zeros(dims if dims else (), dtype=complex)
    state[(0,) * len(dims)] = 1.0
    nd = len(dims)
    ci = 0
    for op in c.ops:
        if isinstance(op, Gate):
            state = _apply(state, op.matrix, [layout.index(r) for r in op.regs])
        elif isinstance(op, OracleCall):
            m = apply_variant(phase * u, op.variant)
            t = _oracle_axis(c, op)
            if not op.controlled:
                state = _apply(state, m, [t])
                continue
            ctl = layout.index(op.control)
            tt = _shifted(t, ctl)
            if bits is None:
                state = _controlled(state, ctl, lambda s: _apply(s, m, [tt]))
            else:
                b = int(bits[ci])
                out = np.zeros_like(state)
                sl = _slice(nd, ctl, b)
                out[sl] = _apply(state[sl], m, [tt]) if b else state[sl]
                state = out
            ci += 1
        elif isinstance(op, Adder):
            k = layout.index(op.reg)
            if op.control is None:
                state = np.roll(state, op.shift, axis=k)
            else:
                ctl = layout.index(op.control)
                kk = _shifted(k, ctl)
                state = _controlled(state, ctl, lambda s: np.roll(s, op.shift, axis=kk))
        elif isinstance(op, CSwap):
            ctl = layout.index(op.control)
            a, b = _shifted(layout.index(op.a), ctl), _shifted(layout.index(op.b), ctl)
            state = _controlled(state, ctl, lambda s: np.swapaxes(s, a, b))
        else:
            raise TypeError(f"unknown op {op!r}")
    return state


def _check_binding(c: Circuit, u: Optional[np.ndarray]) -> None:
    if not c.oracle_calls:
        return
    if u is None:
        raise ValueError("circuit queries an oracle but no oracle was bound")
    d = c.oracle_dim
    if u.shape != (d, d):
        raise ValueError(f"oracle has dim {u.shape[0]}, circuit target register has dim {d}")


def _binding_args(c: Circuit, b) -> tuple[Optional[np.ndarray], complex]:
    if b is None:
        _check_binding(c, None)
        return None, 1.0
    if not isinstance(b, OracleBinding):
        b = OracleBinding(b)
    _check_binding(c, b.u)
    return b.u, b.phase


def _reduce(c: Circuit, vec: np.ndarray) -> np.ndarray:
    """``tr_traced |vec><vec|`` with the kept registers in layout order."""
    layout = c.layout
    keep = [i for i, r in enumerate(layout.registers) if r.name not in layout.traced]
    drop = [i for i, r in enumerate(layout.registers) if r.name in layout.traced]
    t = vec.reshape(layout.dims) if layout.registers else vec.reshape(())
    t = np.transpose(t, keep + drop)
    dk = int(np.prod([layout.dims[i] for i in keep])) if keep else 1
    m = t.reshape(dk, -1)
    return m @ m.conj().T


def _density(c: Circuit, m: np.ndarray) -> DensityState:
    return DensityState(tuple(c.layout.kept()), m)


# --- public API ------------------------------------------------------------

def run_pure(c: Circuit, b=None) -> np.ndarray:
    """Output vector of ``c`` with every oracle call realised by ``b``."""
    ensure_valid(c)
    u, phase = _binding_args(c, b)
    return _evolve(c, u, phase).reshape(-1)


def traced_projector(c: Circuit, vec: np.ndarray) -> np.ndarray:
    """Partial trace of ``|vec><vec|`` over the circuit's traced registers."""
    return _reduce(c, np.asarray(vec, dtype=complex))


def output_density(c: Circuit, b=None) -> DensityState:
    return _density(c, traced_projector(c, run_pure(c, b)))


def feyn_path(c: Circuit, u, bits: Sequence[int]) -> np.ndarray:
    """Sub-normalised branch of the output with the controlled calls' control bits fixed.

    Uncontrolled calls apply ``u^variant`` with unit phase.
    """
    ensure_valid(c)
    n = c.n_controlled
    if len(bits) != n:
        raise ValueError(f"expected {n} control bits, got {len(bits)}")
    if any(bit not in (0, 1) for bit in bits):
        raise ValueError(f"control bits must be 0 or 1, got {list(bits)}")
    u = None if u is None else np.asarray(u, dtype=complex)
    _check_binding(c, u)
    return _evolve(c, u, 1.0, bits).reshape(-1)


def path_weight(c: Circuit, bits: Sequence[int]) -> int:
    """``sum_i sigma(variant_i) * b_i`` over the controlled calls."""
    return sum(sigma(op.variant) * int(bit) for op, bit in zip(c.controlled_calls, bits))


def feyn_paths(c: Circuit, u) -> dict[tuple[int, ...], np.ndarray]:
    """All ``2**n`` control-bit paths keyed by their bit tuple."""
    return {bits: feyn_path(c, u, bits) for bits in itertools.product((0, 1), repeat=c.n_controlled)}


def weight_range(c: Circuit) -> tuple[int, int]:
    s = [sigma(op.variant) for op in c.controlled_calls]
    return sum(x for x in s if x < 0), sum(x for x in s if x > 0)


def feyn_weight_sum(c: Circuit, u, k: int, paths: Optional[dict] = None) -> np.ndarray:
    """Sum of the paths whose weight is exactly ``k`` (zero vector if none)."""
    paths = feyn_paths(c, u) if paths is None else paths
    out = np.zeros(c.layout.total_dim, dtype=complex)
    for bits, v in paths.items():
        if path_weight(c, bits) == k:
            out = out + v
    return out


def feyn_mod_sum(c: Circuit, u, k: int, q: int, paths: Optional[dict] = None) -> np.ndarray:
    """Sum of the paths whose weight is congruent to ``k`` modulo ``q``."""
    paths = feyn_paths(c, u) if paths is None else paths
    out = np.zeros(c.layout.total_dim, dtype=complex)
    for bits, v in paths.items():
        if (path_weight(c, bits) - k) % q == 0:
            out = out + v
    return out


def phase_avg_output(c: Circuit, u, g) -> DensityState:
    """``(1/q) * sum_{phi in C_q} rho(phi * u)``, enumerated exactly."""
    ensure_valid(c)
    g = g if isinstance(g, PhaseGroup) else PhaseGroup(int(g))
    u = np.asarray(u, dtype=complex)
    total = None
    for phi in g.elements():
        m = output_density(c, OracleBinding(u, phi)).matrix
        total = m if total is None else total + m
    return _density(c, total / g.q)


def eigenphase_mixture(c: Circuit, u) -> DensityState:
    """``(1/d) * sum_i rho(u / lambda_i)`` over the eigenvalues of ``u``."""
    ensure_valid(c)
    u = np.asarray(u, dtype=complex)
    lam, _ = unitary_eig(u)
    total = None
    for x in lam:
        m = output_density(c, OracleBinding(u, np.conj(x))).matrix
        total = m if total is None else total + m
    return _density(c, total / len(lam))


def default_q(c: Circuit) -> int:
    """Smallest phase-group order for which the average is exact: ``n + 1``."""
    return c.n_controlled + 1
