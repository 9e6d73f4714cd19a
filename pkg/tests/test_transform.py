import math

import numpy as np
import pytest

from qdecontrol.circuit import (
    Adder,
    Circuit,
    CSwap,
    Gate,
    OracleCall,
    Register,
    RegisterLayout,
    Variant,
    apply_variant,
    sigma,
    validate,
)
from qdecontrol.harness import random_circuit, random_unitary
from qdecontrol.linalg import max_entangled
from qdecontrol.simulator import run_pure
from qdecontrol.transform import (
    FULL,
    NO_COUNTER,
    Counter,
    DecontrolError,
    DecontrolVariant,
    Hold,
    Period,
    build_gadget,
    counter_dim,
    decontrol,
    overhead_report,
    resolve_hold,
)

from conftest import dense_unitary


def add_matrix(dim, shift):
    return np.roll(np.eye(dim), shift, axis=0)


def gadget_layout(hold_role, kdim):
    regs = [Register("C", 2, "control"), Register("R", 2, "target")]
    if kdim:
        regs.append(Register("K", kdim, "counter"))
    regs.append(Register("X", 2, hold_role))
    return RegisterLayout(tuple(regs))


@pytest.mark.parametrize("variant", list(Variant))
def test_gadget_matrix(variant, rng):
    u = random_unitary(2, rng)
    hold_role = "hold" if variant in (Variant.U, Variant.U_DAG) else "hold_transpose"
    lay = gadget_layout(hold_role, 3)
    ops = build_gadget(variant, DecontrolVariant(FULL, Hold.BOTH), "C", "R", "X", "K")
    got = dense_unitary(Circuit(lay, ops), u)
    uv = apply_variant(u, variant)
    p0, p1, i2, i3 = np.diag([1, 0]), np.diag([0, 1]), np.eye(2), np.eye(3)
    want = (np.kron(np.kron(np.kron(p0, i2), i3), uv)
            + np.kron(np.kron(np.kron(p1, uv), add_matrix(3, sigma(variant))), i2))
    assert np.max(np.abs(got - want)) < 1e-12


def test_gadget_structure_and_adder_sign():
    ops = build_gadget(Variant.U_DAG, DecontrolVariant(), "C", "R", "H", "K")
    assert ops[0] == Adder("K", -1, "C")
    assert ops[1] == CSwap("C", "R", "H") == ops[3]
    assert ops[2] == OracleCall(Variant.U_DAG, False, None, "hold")
    with pytest.raises(DecontrolError):
        build_gadget(Variant.U, DecontrolVariant(), "C", "R", None, "K")


def test_gadget_without_counter(rng):
    u = random_unitary(2, rng)
    lay = gadget_layout("hold", None)
    ops = build_gadget(Variant.U, DecontrolVariant(NO_COUNTER), "C", "R", "X", None)
    assert not any(isinstance(op, Adder) for op in ops)
    got = dense_unitary(Circuit(lay, ops), u)
    p0, p1, i2 = np.diag([1, 0]), np.diag([0, 1]), np.eye(2)
    want = np.kron(np.kron(p0, i2), u) + np.kron(np.kron(p1, u), i2)
    assert np.max(np.abs(got - want)) < 1e-12


def single_call(variant=Variant.U):
    lay = RegisterLayout((Register("C", 2, "control"), Register("R", 2, "target")))
    return Circuit(lay, (OracleCall(variant, True, "C"),))


def test_single_controlled_call_full():
    dc = decontrol(single_call())
    assert dc.layout.get("K").dim == 2
    assert {"K", "H", "HP"} <= dc.layout.traced
    assert dc.n_controlled == 0
    assert sum(isinstance(op, CSwap) for op in dc.ops) == 2
    assert validate(dc) == []


def test_both_holds_start_entangled():
    c = single_call()
    dc = decontrol(c, DecontrolVariant(FULL, Hold.BOTH))
    assert dc.layout.names == ["C", "R", "K", "H", "HT"]
    first = dc.ops[0]
    assert isinstance(first, Gate) and first.regs == ("H", "HT")
    assert np.allclose(first.matrix[:, 0], max_entangled(2))


def test_no_controlled_calls_unchanged(rng):
    lay = RegisterLayout((Register("R", 2, "target"),))
    c = Circuit(lay, (Gate(("R",), random_unitary(2, rng)), OracleCall(Variant.U)))
    assert decontrol(c) is c
    assert overhead_report(c).to_dict()["extra_qubits"] == 0


def test_gates_and_uncontrolled_calls_pass_through(rng):
    c = random_circuit(rng, 3, 3, max_uncontrolled=2)
    dc = decontrol(c)
    kept = [op for op in dc.ops[1:] if not isinstance(op, (Adder, CSwap))
            and not (isinstance(op, OracleCall) and op.target != "target")]
    orig = [op for op in c.ops if not (isinstance(op, OracleCall) and op.controlled)]
    assert kept == orig


def test_name_collisions_get_suffixes():
    lay = RegisterLayout((Register("C", 2, "control"), Register("R", 2, "target"), Register("K", 2), Register("H", 2)))
    dc = decontrol(Circuit(lay, (OracleCall(Variant.U, True, "C"),)), DecontrolVariant(FULL, Hold.BOTH))
    assert dc.layout.names[4:] == ["K1", "H1", "HT"]


def test_resolve_hold():
    mixed = Circuit(single_call().layout, (OracleCall(Variant.U, True, "C"), OracleCall(Variant.U_CONJ, True, "C")))
    assert resolve_hold(single_call(), Hold.AUTO) is Hold.H_ONLY
    assert resolve_hold(single_call(Variant.U_TRANS), Hold.AUTO) is Hold.HT_ONLY
    assert resolve_hold(mixed, Hold.AUTO) is Hold.BOTH
    with pytest.raises(DecontrolError):
        resolve_hold(mixed, Hold.H_ONLY)
    with pytest.raises(DecontrolError):
        resolve_hold(single_call(), Hold.HT_ONLY)


def test_counter_policies():
    assert counter_dim(single_call(), FULL) == 2
    assert counter_dim(single_call(), NO_COUNTER) is None
    assert counter_dim(single_call(), Period(3)) == 3
    assert str(Period(3)) == "period:3"
    with pytest.raises(ValueError):
        Period(0)
    with pytest.raises(ValueError):
        Counter("fancy")


def test_variant_parse():
    dv = DecontrolVariant.parse("period:4", "ht")
    assert dv.counter == Period(4) and dv.hold is Hold.HT_ONLY
    assert DecontrolVariant.parse("no-counter").to_dict() == {"counter": "no-counter", "hold": "auto"}
    for bad in ("period:x", "partial"):
        with pytest.raises(ValueError):
            DecontrolVariant.parse(bad)


def test_overhead_examples():
    lay = RegisterLayout((Register("C", 2, "control"), Register("R", 4, "target")))
    c = Circuit(lay, tuple(OracleCall(Variant.U, True, "C") for _ in range(3)))
    r = overhead_report(c, DecontrolVariant(FULL, Hold.BOTH))
    assert r.extra_qubits == 6 and r.counter_dim == 4
    assert (r.per_gadget.cswaps, r.per_gadget.adders, r.per_gadget.oracle_calls) == (2, 1, 1)
    assert r.extra_gate_count == 9 and r.gadget_count == 3

    r = overhead_report(single_call(), DecontrolVariant(NO_COUNTER, Hold.H_ONLY))
    assert r.extra_qubits == 1
    assert (r.per_gadget.cswaps, r.per_gadget.adders, r.per_gadget.oracle_calls) == (2, 0, 1)


def test_overhead_zero_calls():
    lay = RegisterLayout((Register("R", 2, "target"),))
    r = overhead_report(Circuit(lay, ()))
    assert r.to_dict() == {
        "extra_qubits": 0, "extra_gate_count": 0, "gadget_count": 0,
        "per_gadget": {"cswaps": 0, "adders": 0, "oracle_calls": 0},
        "counter_dim": None, "hold_registers": 0,
    }


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_overhead_matches_layout(n, d, rng):
    c = random_circuit(rng, n, d)
    for dv in (DecontrolVariant(), DecontrolVariant(FULL, Hold.BOTH), DecontrolVariant(NO_COUNTER), DecontrolVariant(Period(2))):
        dc = decontrol(c, dv)
        added = [r for r in dc.layout.registers[len(c.layout.registers):] if r.role != "ancilla"]
        qubits = sum(math.ceil(math.log2(r.dim)) for r in added)
        assert overhead_report(c, dv).extra_qubits == qubits


def test_decontrolled_state_is_normalised(rng):
    c = random_circuit(rng, 3, 2)
    assert abs(np.linalg.norm(run_pure(decontrol(c), random_unitary(2, rng))) - 1) < 1e-12
