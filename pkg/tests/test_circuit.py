import numpy as np
import pytest

from qdecontrol.circuit import (
    Adder,
    Circuit,
    CSwap,
    Gate,
    InvalidCircuitError,
    OracleCall,
    Register,
    RegisterLayout,
    Variant,
    apply_variant,
    ensure_valid,
    sigma,
    validate,
)


def layout(*regs, traced=()):
    return RegisterLayout(tuple(Register(*r) for r in regs), frozenset(traced))


BASIC = layout(("C", 2, "control"), ("R", 2, "target"))


def test_sigma_table():
    assert sigma(Variant.U) == 1
    assert sigma(Variant.U_TRANS) == 1
    assert sigma(Variant.U_DAG) == -1
    assert sigma(Variant.U_CONJ) == -1
    assert sigma("U") == 1


def test_sigma_matches_phase_exponent(rng):
    u = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    phi = np.exp(0.7j)
    for v in Variant:
        assert np.allclose(apply_variant(phi * u, v), phi ** sigma(v) * apply_variant(u, v))


def test_apply_variant():
    u = np.array([[0, 1], [1j, 0]])
    assert np.array_equal(apply_variant(u, Variant.U), u)
    assert np.array_equal(apply_variant(u, Variant.U_DAG), [[0, -1j], [1, 0]])
    assert np.array_equal(apply_variant(u, Variant.U_CONJ), [[0, 1], [-1j, 0]])
    assert np.array_equal(apply_variant(u, Variant.U_TRANS), [[0, 1j], [1, 0]])


def test_layout_queries():
    lay = layout(("A", 3), ("R", 2, "target"), ("C", 2, "control"), traced={"A"})
    assert lay.names == ["A", "R", "C"]
    assert lay.dims == (3, 2, 2)
    assert lay.total_dim == 12
    assert lay.index("C") == 2
    assert lay.role_register("target").name == "R"
    assert [r.name for r in lay.kept()] == ["R", "C"]
    with pytest.raises(KeyError):
        lay.index("Z")
    with pytest.raises(KeyError):
        lay.role_register("hold")


def test_circuit_counts():
    c = Circuit(BASIC, (OracleCall(Variant.U, True, "C"), OracleCall(Variant.U_DAG), Gate(("C",), np.eye(2))))
    assert c.n_queries == 2
    assert c.n_controlled == 1
    assert c.oracle_dim == 2


def test_gate_equality_compares_matrices():
    assert Gate(("C",), np.eye(2)) == Gate(["C"], np.eye(2))
    assert Gate(("C",), np.eye(2)) != Gate(("C",), -np.eye(2))


def test_validate_empty():
    assert validate(Circuit(BASIC, ())) == []


def test_validate_gate_shape_mismatch():
    lay = layout(("A", 2), ("B", 2))
    v = validate(Circuit(lay, (Gate(("A", "B"), np.eye(3)),)))
    assert len(v) == 1 and v[0].op_index == 0 and "shape" in v[0].message


def test_validate_dim3_control():
    lay = layout(("Q", 3), ("R", 2, "target"))
    v = validate(Circuit(lay, (OracleCall(Variant.U, True, "Q"),)))
    assert len(v) == 1 and "dim 3" in v[0].message


@pytest.mark.parametrize(
    "lay, ops, fragment",
    [
        (layout(("R", 2, "target"), ("R", 2)), (), "duplicate"),
        (layout(("C", 3, "control"), ("R", 2, "target")), (), "expected 2"),
        (layout(("R", 2, "wizard")), (), "unknown role"),
        (layout(("R", 2, "target"), traced={"Z"}), (), "traced"),
        (layout(("C", 2, "control")), (OracleCall(Variant.U, True, "C"),), "exactly one target"),
        (BASIC, (Gate(("C",), np.diag([1, 2])),), "not unitary"),
        (BASIC, (Gate(("Z",), np.eye(2)),), "unknown registers"),
        (BASIC, (Gate(("C", "C"), np.eye(4)),), "repeats"),
        (BASIC, (OracleCall(Variant.U, True, None),), "missing"),
        (BASIC, (OracleCall(Variant.U, False, "C"),), "uncontrolled"),
        (BASIC, (OracleCall(Variant.U, False, None, "hold"),), "matches 0"),
        (layout(("C", 2, "control"), ("R", 2, "target"), ("K", 3, "counter")), (Adder("K", 2),), "shift"),
        (BASIC, (Adder("C", 1),), "not a counter"),
        (layout(("C", 2, "control"), ("R", 2, "target"), ("H", 3)), (CSwap("C", "R", "H"),), "unequal"),
        (BASIC, (CSwap("C", "R", "R"),), "distinct"),
        (layout(("C", 2, "control"), ("R", 3, "target"), ("H", 2, "hold")),
         (OracleCall(Variant.U, False, None, "hold"),), "oracle dim"),
    ],
)
def test_validate_violations(lay, ops, fragment):
    v = validate(Circuit(lay, ops))
    assert v, "expected a violation"
    assert any(fragment in x.message for x in v), [str(x) for x in v]


def test_ensure_valid_raises_with_all_violations():
    c = Circuit(layout(("R", 2, "target"), ("R", 2)), (Gate(("Z",), np.eye(2)),))
    with pytest.raises(InvalidCircuitError) as e:
        ensure_valid(c)
    assert len(e.value.violations) == 2
    assert "op 0" in str(e.value)


def test_controlled_adder_is_valid():
    lay = layout(("C", 2, "control"), ("R", 2, "target"), ("K", 3, "counter"))
    assert validate(Circuit(lay, (Adder("K", -1, "C"), Adder("K", 1)))) == []
