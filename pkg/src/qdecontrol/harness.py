"""Equivalence checks and seeded randomized property campaigns.

Random unitaries come from the QR decomposition of a complex Gaussian matrix
``(A + iB)/sqrt(2)`` (entries of ``A``, ``B`` standard normal, drawn row-major
from ``numpy.random.default_rng``), with the columns of ``Q`` rephased by
``diag(R)/|diag(R)|``. Trial ``t`` of a suite with seed ``s`` draws from
``default_rng([s, t])``, so trials are independent and reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

import numpy as np

from .circuit import Circuit, Gate, OracleCall, Register, RegisterLayout, Variant, sigma
from .fileio import loads_circuit, loads_oracle
from .linalg import choi_vector, kron, kron_all, matrix_power, max_entangled, trace_distance
from .simulator import (
    OracleBinding,
    default_q,
    eigenphase_mixture,
    feyn_mod_sum,
    feyn_paths,
    feyn_weight_sum,
    output_density,
    path_weight,
    phase_avg_output,
    run_pure,
    traced_projector,
    weight_range,
)
from .transform import DecontrolVariant, Hold, NO_COUNTER, Period, FULL, decontrol

DEFAULT_TOL = 1e-9


# --- random objects --------------------------------------------------------

def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_matrix(d: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))


def random_periodic_unitary(d: int, p: int, rng: np.random.Generator) -> np.ndarray:
    """Random ``u`` with ``u**p = I``: random eigenbasis, eigenvalues drawn from ``C_p``."""
    v = random_unitary(d, rng)
    lam = np.exp(2j * np.pi * rng.integers(0, p, size=d) / p)
    return (v * lam) @ v.conj().T


def random_circuit(
    rng: np.random.Generator,
    n: int,
    d: int,
    variants: Optional[Sequence[Variant]] = None,
    max_uncontrolled: int = 2,
) -> Circuit:
    """A random circuit with ``n`` controlled oracle calls on a dim-``d`` target.

    Registers are a control qubit ``C``, the target ``R``, an ancilla qubit
    ``S`` and, half the time, a second control ``C2``. Random gates on random
    register subsets (in random order) sit between the controlled calls, and
    up to ``max_uncontrolled`` uncontrolled calls are inserted at random
    positions.
    """
    variants = list(variants or list(Variant))
    regs = [Register("C", 2, "control"), Register("R", d, "target"), Register("S", 2, "ancilla")]
    if rng.random() < 0.5:
        regs.append(Register("C2", 2, "control"))
    controls = [r.name for r in regs if r.role == "control"]
    traced = {name for name in ("S", "C2") if name in {r.name for r in regs} and rng.random() < 0.5}
    dims = {r.name: r.dim for r in regs}

    def gate():
        k = int(rng.integers(1, min(3, len(regs)) + 1))
        names = [regs[i].name for i in rng.permutation(len(regs))[:k]]
        dim = int(np.prod([dims[x] for x in names]))
        return Gate(tuple(names), random_unitary(dim, rng))

    ops = [gate()]
    for _ in range(n):
        v = variants[int(rng.integers(len(variants)))]
        ops.append(OracleCall(v, True, controls[int(rng.integers(len(controls)))], "target"))
        ops.append(gate())
    for _ in range(int(rng.integers(0, max_uncontrolled + 1))):
        v = list(Variant)[int(rng.integers(4))]
        ops.insert(int(rng.integers(0, len(ops) + 1)), OracleCall(v, False, None, "target"))
    return Circuit(RegisterLayout(tuple(regs), frozenset(traced)), tuple(ops))


# --- equivalence -----------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceReport:
    trace_distance: float
    q_used: Optional[int]
    variant: DecontrolVariant
    passed: bool
    tolerance: float
    reference: str = "phase_average"

    def to_dict(self) -> dict:
        return {
            "trace_distance": self.trace_distance,
            "q_used": self.q_used,
            "variant": self.variant.to_dict(),
            "pass": self.passed,
            "tolerance": self.tolerance,
            "reference": self.reference,
        }


def check_equivalence(
    c: Circuit,
    u,
    dv: Optional[DecontrolVariant] = None,
    q: Optional[int] = None,
    tol: float = DEFAULT_TOL,
    decontrolled: Optional[Circuit] = None,
) -> EquivalenceReport:
    """Compare the decontrolled output against its reference.

    The reference is the exact ``C_q`` phase average of ``c``, or the
    eigenphase mixture when the variant has no counter. ``q`` defaults to
    ``n + 1`` for the full counter and to ``p`` for a period-``p`` counter:
    with ``u**p = I`` the period counter reproduces the ``C_p`` average, which
    in general differs from the ``q > n`` average. ``decontrolled`` may supply
    an already transformed circuit, e.g. one read back from disk.
    """
    dv = dv or DecontrolVariant()
    u = np.asarray(u, dtype=complex)
    if q is not None and q < 1:
        raise ValueError(f"q must be positive, got {q}")
    dc = decontrolled if decontrolled is not None else decontrol(c, dv)
    got = output_density(dc, OracleBinding(u)).matrix
    if dv.counter.kind == "none":
        ref, q_used, name = eigenphase_mixture(c, u).matrix, None, "eigenphase_mixture"
    else:
        if q is not None:
            q_used = int(q)
        elif dv.counter.kind == "period":
            q_used = dv.counter.p
        else:
            q_used = default_q(c)
        ref, name = phase_avg_output(c, u, q_used).matrix, "phase_average"
    dist = trace_distance(got, ref)
    return EquivalenceReport(dist, q_used, dv, dist <= tol, tol, name)


# --- identity checks used by the suite and the tests -----------------------

def ricochet_error(x) -> float:
    x = np.asarray(x, dtype=complex)
    d = x.shape[0]
    phi = max_entangled(d)
    eye = np.eye(d)
    left = kron(x, eye) @ phi
    right = kron(eye, x.T) @ phi
    return float(max(np.max(np.abs(left - right)), np.max(np.abs(left - choi_vector(x)))))


def uncontrolled_weight(c: Circuit) -> int:
    return sum(sigma(op.variant) for op in c.oracle_calls if not op.controlled)


def single_output_error(c: Circuit, u, phi: complex) -> float:
    """``run_pure(c, phi*u)`` versus the phase-weighted sum over control-bit paths."""
    want = run_pure(c, OracleBinding(u, phi))
    got = np.zeros_like(want)
    for bits, v in feyn_paths(c, u).items():
        got = got + phi ** path_weight(c, bits) * v
    got = got * phi ** uncontrolled_weight(c)
    return float(np.max(np.abs(want - got)))


def mixture_error(c: Circuit, u, q: int) -> float:
    """Phase average over ``C_q`` versus the mixture of path sums grouped mod ``q``."""
    paths = feyn_paths(c, u)
    mix = sum(traced_projector(c, feyn_mod_sum(c, u, k, q, paths)) for k in range(q))
    return trace_distance(phase_avg_output(c, u, q).matrix, mix)


def path_decomposition_error(c: Circuit, u) -> float:
    """Decontrolled pure output (full counter, both hold registers) versus
    ``sum_k feyn(k) ⊗ |k mod |K|> ⊗ choi(u^(S - k))`` with ``S`` the sum of
    the controlled calls' signs."""
    u = np.asarray(u, dtype=complex)
    dc = decontrol(c, DecontrolVariant(FULL, Hold.BOTH))
    got = run_pure(dc, OracleBinding(u))
    kdim = c.n_controlled + 1
    total = sum(sigma(op.variant) for op in c.controlled_calls)
    paths = feyn_paths(c, u)
    lo, hi = weight_range(c)
    want = np.zeros_like(got)
    for k in range(lo, hi + 1):
        ket = np.zeros(kdim, dtype=complex)
        ket[k % kdim] = 1.0
        want = want + kron_all([feyn_weight_sum(c, u, k, paths), ket, choi_vector(matrix_power(u, total - k))]).reshape(-1)
    return float(np.max(np.abs(got - want)))


def density_defect(c: Circuit, u, phi: complex) -> float:
    """Largest violation of Hermiticity, unit trace or positivity of ``rho(phi*u)``."""
    m = output_density(c, OracleBinding(u, phi)).matrix
    herm = np.max(np.abs(m - m.conj().T))
    tr = abs(np.trace(m) - 1)
    neg = max(0.0, -float(np.min(np.linalg.eigvalsh((m + m.conj().T) / 2))))
    return float(max(herm, tr, neg))


# --- property suite ---------------------------------------------------------

PROPERTIES = (
    "ricochet",
    "feynman_single_output",
    "feynman_mixture",
    "simulated_path_decomposition",
    "decontrol_equivalence",
    "q_independence",
    "no_counter_eigenphase",
    "period_counter",
    "hold_reduction",
    "no_controlled_calls",
    "density_valid",
)

PROPERTY_TOLERANCES = {
    "ricochet": 1e-12,
    "feynman_single_output": 1e-10,
    "feynman_mixture": 1e-9,
    "simulated_path_decomposition": 1e-9,
    "decontrol_equivalence": 1e-9,
    "q_independence": 1e-10,
    "no_counter_eigenphase": 1e-9,
    "period_counter": 1e-9,
    "hold_reduction": 1e-9,
    "no_controlled_calls": 0.0,
    "density_valid": 1e-9,
}


def run_trial(seed: int, t: int, max_n: int, dims: Sequence[int]) -> dict[str, float]:
    """Evaluate every suite property on trial ``t``; returns the error per property."""
    rng = np.random.default_rng([seed, t])
    n = int(rng.integers(1, max_n + 1))
    d = int(dims[int(rng.integers(len(dims)))])
    c = random_circuit(rng, n, d)
    u = random_unitary(d, rng)
    phi = np.exp(2j * np.pi * rng.random())
    out = {}

    out["ricochet"] = ricochet_error(random_matrix(d, rng))
    out["feynman_single_output"] = single_output_error(c, u, phi)
    out["feynman_mixture"] = max(mixture_error(c, u, n + 1), mixture_error(c, u, int(rng.integers(1, n + 1))))
    out["simulated_path_decomposition"] = path_decomposition_error(c, u)
    out["decontrol_equivalence"] = check_equivalence(c, u).trace_distance
    out["q_independence"] = trace_distance(phase_avg_output(c, u, n + 1).matrix, phase_avg_output(c, u, n + 7).matrix)
    out["no_counter_eigenphase"] = check_equivalence(c, u, DecontrolVariant(NO_COUNTER)).trace_distance

    p = int(rng.integers(1, 4))
    up = random_periodic_unitary(d, p, rng)
    out["period_counter"] = check_equivalence(c, up, DecontrolVariant(Period(p))).trace_distance

    side = [Variant.U, Variant.U_DAG] if rng.random() < 0.5 else [Variant.U_CONJ, Variant.U_TRANS]
    cr = random_circuit(rng, n, d, variants=side)
    both = output_density(decontrol(cr, DecontrolVariant(FULL, Hold.BOTH)), OracleBinding(u)).matrix
    one = output_density(decontrol(cr, DecontrolVariant(FULL, Hold.AUTO)), OracleBinding(u)).matrix
    out["hold_reduction"] = trace_distance(both, one)

    dcs = [decontrol(c, DecontrolVariant(k, h)) for k in (FULL, NO_COUNTER, Period(2)) for h in (Hold.AUTO, Hold.BOTH)]
    out["no_controlled_calls"] = float(sum(dc.n_controlled for dc in dcs))
    out["density_valid"] = max(density_defect(c, u, phi), density_defect(dcs[0], u, 1.0))
    return out


def run_property_suite(seed: int = 7, trials: int = 100, max_n: int = 3, dims: Sequence[int] = (2, 3, 4)) -> dict:
    """Run ``trials`` seeded trials and summarise pass/fail counts per property."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    stats = {name: {"name": name, "pass": 0, "fail": 0, "worst_distance": 0.0} for name in PROPERTIES}
    for t in range(trials):
        for name, err in run_trial(seed, t, max_n, tuple(dims)).items():
            s = stats[name]
            s["pass" if err <= PROPERTY_TOLERANCES[name] else "fail"] += 1
            s["worst_distance"] = max(s["worst_distance"], float(err))
    return {"seed": seed, "trials": trials, "properties": [stats[name] for name in PROPERTIES]}


def summary_json(summary: dict) -> str:
    return json.dumps(summary, indent=1)


# --- stored regression instance ---------------------------------------------

def regression_instance() -> tuple[Circuit, OracleBinding]:
    """Hadamard test with two controlled queries to ``u = I``.

    The two control-1 queries put paths of weight 0 and 2 on the same output,
    so averaging over ``C_2`` keeps them coherent while any ``q > 2`` does not.
    """
    pkg = resources.files("qdecontrol") / "data"
    c = loads_circuit((pkg / "regression_q2.json").read_text(encoding="utf-8"))
    b = loads_oracle((pkg / "regression_q2_oracle.json").read_text(encoding="utf-8"))
    return c, b
