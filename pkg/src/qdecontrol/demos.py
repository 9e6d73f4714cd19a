"""Small exact demonstrations of what decontrolling keeps and what it loses.

All probabilities are read off density-matrix diagonals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .circuit import Circuit, Gate, OracleCall, Register, RegisterLayout, Variant
from .linalg import entangler
from .simulator import OracleBinding, output_density
from .transform import decontrol

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)

DEMOS = ("global-phase", "commutativity", "state-prep", "pru-phase")


@dataclass(frozen=True)
class DemoResult:
    name: str
    controlled_success: float
    decontrolled_success: float
    narrative: str
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "controlled_success": self.controlled_success,
            "decontrolled_success": self.decontrolled_success,
            "narrative": self.narrative,
            "details": self.details,
        }


class Demo(NamedTuple):
    circuits: dict
    bindings: dict
    result: DemoResult


def _prob(c: Circuit, b: OracleBinding, reg: str, value: int) -> float:
    return float(output_density(c, b).marginal(reg)[value])


def _hadamard_test() -> Circuit:
    layout = RegisterLayout((Register("C", 2, "control"), Register("R", 2, "target")), {"R"})
    return Circuit(layout, (
        Gate(("C",), HADAMARD),
        OracleCall(Variant.U, True, "C"),
        Gate(("C",), HADAMARD),
    ))


def global_phase() -> Demo:
    c = _hadamard_test()
    dc = decontrol(c)
    bindings = {"I": OracleBinding(IDENTITY), "-I": OracleBinding(-IDENTITY)}

    def success(circ):
        # outcome 0 means "I", outcome 1 means "-I"
        return 0.5 * (_prob(circ, bindings["I"], "C", 0) + _prob(circ, bindings["-I"], "C", 1))

    res = DemoResult(
        "global-phase", success(c), success(dc),
        "Hadamard test deciding U = I versus U = -I. One controlled query decides "
        "it with certainty; the decontrolled circuit sees the same output for both "
        "oracles and can only guess.",
    )
    return Demo({"controlled": c, "decontrolled": dc}, bindings, res)


def state_prep() -> Demo:
    # H on C, C-U, X on C, C-U, H on C: both branches apply U exactly once, so
    # they carry equal phase weight and stay coherent after decontrolling.
    layout = RegisterLayout((Register("C", 2, "control"), Register("R", 2, "target")))
    c = Circuit(layout, (
        Gate(("C",), HADAMARD),
        OracleCall(Variant.U, True, "C"),
        Gate(("C",), PAULI_X),
        OracleCall(Variant.U, True, "C"),
        Gate(("C",), HADAMARD),
    ))
    dc = decontrol(c)
    # class 0 prepares |0>, class 1 prepares |+>; the preparation phases are arbitrary
    bindings = {
        "prep0": OracleBinding(IDENTITY, np.exp(0.3j)),
        "prep1": OracleBinding(HADAMARD, np.exp(-1.1j)),
    }

    def success(circ):
        return 0.5 * (_prob(circ, bindings["prep0"], "R", 0) + _prob(circ, bindings["prep1"], "R", 1))

    coherent = _prob(c, bindings["prep1"], "C", 0), _prob(dc, bindings["prep1"], "C", 0)
    res = DemoResult(
        "state-prep", success(c), success(dc),
        "Distinguishing a |0> preparation from a |+> preparation with two controlled "
        "queries. The task does not depend on the preparations' global phases, so the "
        "decontrolled circuit succeeds with the same probability.",
        {"control_returns_to_0": {"controlled": coherent[0], "decontrolled": coherent[1]}},
    )
    return Demo({"controlled": c, "decontrolled": dc}, bindings, res)


def _commutator_test(fixed: np.ndarray, oracle_first: bool) -> Circuit:
    """Hadamard test of ``W = V^† U^† V U`` on half of a maximally entangled pair.

    Accepts (control reads 0) with probability ``(1 + Re tr(W)/d) / 2``. One of
    ``U``, ``V`` is the oracle and the other a fixed controlled gate.
    """
    d = fixed.shape[0]
    layout = RegisterLayout(
        (Register("C", 2, "control"), Register("A", d, "target"), Register("B", d, "ancilla")),
        {"A", "B"},
    )

    def cgate(m):
        return Gate(("C", "A"), np.block([[np.eye(d), np.zeros((d, d))], [np.zeros((d, d)), m]]))

    if oracle_first:   # oracle is U, fixed is V
        steps = [OracleCall(Variant.U, True, "C"), cgate(fixed),
                 OracleCall(Variant.U_DAG, True, "C"), cgate(fixed.conj().T)]
    else:              # oracle is V, fixed is U
        steps = [cgate(fixed), OracleCall(Variant.U, True, "C"),
                 cgate(fixed.conj().T), OracleCall(Variant.U_DAG, True, "C")]
    ops = [Gate(("A", "B"), entangler(d)), Gate(("C",), HADAMARD), *steps, Gate(("C",), HADAMARD)]
    return Circuit(layout, tuple(ops))


def commutativity(u=None, v=None) -> Demo:
    u = PAULI_X if u is None else np.asarray(u, dtype=complex)
    v = PAULI_Z if v is None else np.asarray(v, dtype=complex)
    c_u = _commutator_test(v, oracle_first=True)
    c_v = _commutator_test(u, oracle_first=False)
    dc_u, dc_v = decontrol(c_u), decontrol(c_v)
    bu, bv = OracleBinding(u), OracleBinding(v)
    acc = {
        "oracle_U": {"controlled": _prob(c_u, bu, "C", 0), "decontrolled": _prob(dc_u, bu, "C", 0)},
        "oracle_V": {"controlled": _prob(c_v, bv, "C", 0), "decontrolled": _prob(dc_v, bv, "C", 0)},
    }
    comm = u @ v - v @ u
    res = DemoResult(
        "commutativity", acc["oracle_U"]["controlled"], acc["oracle_U"]["decontrolled"],
        "Controlled Hadamard test of the group commutator V^dag U^dag V U on a Choi "
        "state; it accepts with certainty iff U and V commute. Its acceptance "
        "probability ignores the global phases of U and V, so decontrolling either "
        "oracle leaves it unchanged.",
        {
            "accept": acc,
            "normalized_commutator_norm": float(np.linalg.norm(comm) / np.sqrt(u.shape[0])),
        },
    )
    return Demo(
        {"controlled_U": c_u, "decontrolled_U": dc_u, "controlled_V": c_v, "decontrolled_V": dc_v},
        {"U": bu, "V": bv},
        res,
    )


def pru_phase() -> Demo:
    c = _hadamard_test()
    dc = decontrol(c)
    paulis = {"I": IDENTITY, "X": PAULI_X, "Y": PAULI_Y, "Z": PAULI_Z}
    phases = np.exp(2j * np.pi * np.arange(4) / 4)
    plain = {k: OracleBinding(p) for k, p in paulis.items()}
    augmented = {f"{j}*{k}": OracleBinding(p, phi) for k, p in paulis.items() for j, phi in enumerate(phases)}

    def advantage(circ):
        a = np.mean([_prob(circ, b, "C", 0) for b in plain.values()])
        b = np.mean([_prob(circ, b, "C", 0) for b in augmented.values()])
        return float(a - b), float(a), float(b)

    adv_c, acc_c_plain, acc_c_aug = advantage(c)
    adv_d, acc_d_plain, acc_d_aug = advantage(dc)
    # guessing "plain" on accept, with equal priors on the two ensembles
    res = DemoResult(
        "pru-phase", 0.5 + abs(adv_c) / 2, 0.5 + abs(adv_d) / 2,
        "A controlled Hadamard test tells the Pauli ensemble {P} from the phase-"
        "augmented ensemble {phi P : phi in C_4}. Decontrolled, the same "
        "distinguisher has zero advantage because the augmented ensemble is phase "
        "invariant.",
        {
            "controlled_advantage": abs(adv_c),
            "decontrolled_advantage": abs(adv_d),
            "accept": {
                "controlled": {"plain": acc_c_plain, "augmented": acc_c_aug},
                "decontrolled": {"plain": acc_d_plain, "augmented": acc_d_aug},
            },
        },
    )
    return Demo({"controlled": c, "decontrolled": dc}, {"plain": plain, "augmented": augmented}, res)


def build_demo(name: str, **kwargs) -> Demo:
    builders = {
        "global-phase": global_phase,
        "commutativity": commutativity,
        "state-prep": state_prep,
        "pru-phase": pru_phase,
    }
    if name not in builders:
        raise ValueError(f"unknown demo {name!r}; choose from {', '.join(DEMOS)}")
    return builders[name](**kwargs)
