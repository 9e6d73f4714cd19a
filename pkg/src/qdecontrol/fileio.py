"""JSON reading and writing for circuits and oracle bindings.

Complex numbers are ``[re, im]`` pairs and matrices are row-major nested
lists. Floats go through ``repr`` so a write/read cycle is bit-exact.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .circuit import (
    ROLES,
    Adder,
    Circuit,
    CSwap,
    Gate,
    OracleCall,
    Register,
    RegisterLayout,
    Variant,
)
from .linalg import UNITARY_TOL, is_unitary


class ParseError(ValueError):
    """A document that does not follow the circuit or oracle schema."""


_OP_KEYS = {
    "gate": ({"kind", "regs", "matrix"}, set()),
    "oracle": ({"kind", "variant", "controlled"}, {"control", "target"}),
    "adder": ({"kind", "reg", "shift"}, {"control"}),
    "cswap": ({"kind", "control", "a", "b"}, set()),
}


def _check_keys(obj: Any, required: set, optional: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object, got {type(obj).__name__}")
    missing = required - obj.keys()
    if missing:
        raise ParseError(f"{where}: missing keys {sorted(missing)}")
    unknown = obj.keys() - required - optional
    if unknown:
        raise ParseError(f"{where}: unknown keys {sorted(unknown)}")


def _parse_complex(x: Any, where: str) -> complex:
    if (
        not isinstance(x, list)
        or len(x) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x)
    ):
        raise ParseError(f"{where}: malformed complex pair {x!r}")
    if not all(math.isfinite(v) for v in x):
        raise ParseError(f"{where}: non-finite complex pair {x!r}")
    return complex(float(x[0]), float(x[1]))


def parse_matrix(rows: Any, where: str = "matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{where}: expected a non-empty list of rows")
    ncols = len(rows[0])
    if ncols == 0 or any(len(r) != ncols for r in rows):
        raise ParseError(f"{where}: rows have inconsistent or zero length")
    out = np.empty((len(rows), ncols), dtype=complex)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = _parse_complex(x, f"{where}[{i}][{j}]")
    return out


def dump_matrix(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def _parse_name(x: Any, where: str) -> str:
    if not isinstance(x, str) or not x:
        raise ParseError(f"{where}: expected a non-empty register name, got {x!r}")
    return x


def _parse_int(x: Any, where: str) -> int:
    if not isinstance(x, int) or isinstance(x, bool):
        raise ParseError(f"{where}: expected an integer, got {x!r}")
    return x


def _parse_op(obj: Any, i: int) -> Any:
    where = f"ops[{i}]"
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError(f"{where}: expected an object with a 'kind'")
    kind = obj["kind"]
    if kind not in _OP_KEYS:
        raise ParseError(f"{where}: unknown op kind {kind!r}")
    _check_keys(obj, *_OP_KEYS[kind], where)

    if kind == "gate":
        regs = obj["regs"]
        if not isinstance(regs, list):
            raise ParseError(f"{where}.regs: expected a list")
        return Gate(tuple(_parse_name(r, f"{where}.regs") for r in regs), parse_matrix(obj["matrix"], f"{where}.matrix"))
    if kind == "oracle":
        tag = obj["variant"]
        try:
            variant = Variant(tag)
        except ValueError:
            raise ParseError(f"{where}: unknown oracle variant tag {tag!r}") from None
        controlled = obj["controlled"]
        if not isinstance(controlled, bool):
            raise ParseError(f"{where}.controlled: expected true or false")
        control = obj.get("control")
        if control is not None:
            control = _parse_name(control, f"{where}.control")
        target = obj.get("target", "target")
        if target not in ("target", "hold", "hold_transpose"):
            raise ParseError(f"{where}: unknown oracle target {target!r}")
        return OracleCall(variant, controlled, control, target)
    if kind == "adder":
        control = obj.get("control")
        if control is not None:
            control = _parse_name(control, f"{where}.control")
        return Adder(_parse_name(obj["reg"], f"{where}.reg"), _parse_int(obj["shift"], f"{where}.shift"), control)
    return CSwap(
        _parse_name(obj["control"], f"{where}.control"),
        _parse_name(obj["a"], f"{where}.a"),
        _parse_name(obj["b"], f"{where}.b"),
    )


def circuit_from_dict(doc: Any) -> Circuit:
    _check_keys(doc, {"registers", "ops"}, {"traced"}, "circuit")
    if not isinstance(doc["registers"], list):
        raise ParseError("registers: expected a list")
    regs = []
    seen = set()
    for i, r in enumerate(doc["registers"]):
        where = f"registers[{i}]"
        _check_keys(r, {"name", "dim"}, {"role"}, where)
        name = _parse_name(r["name"], f"{where}.name")
        if name in seen:
            raise ParseError(f"{where}: duplicate register name {name!r}")
        seen.add(name)
        dim = _parse_int(r["dim"], f"{where}.dim")
        if dim < 1:
            raise ParseError(f"{where}.dim: must be positive, got {dim}")
        role = r.get("role", "ancilla")
        if role not in ROLES:
            raise ParseError(f"{where}.role: unknown role {role!r}")
        regs.append(Register(name, dim, role))

    traced = doc.get("traced", [])
    if not isinstance(traced, list):
        raise ParseError("traced: expected a list of register names")
    traced = [_parse_name(t, "traced") for t in traced]
    if len(set(traced)) != len(traced):
        raise ParseError("traced: repeated register name")

    if not isinstance(doc["ops"], list):
        raise ParseError("ops: expected a list")
    ops = [_parse_op(op, i) for i, op in enumerate(doc["ops"])]
    return Circuit(RegisterLayout(tuple(regs), frozenset(traced)), tuple(ops))


def _op_to_dict(op) -> dict:
    if isinstance(op, Gate):
        return {"kind": "gate", "regs": list(op.regs), "matrix": dump_matrix(op.matrix)}
    if isinstance(op, OracleCall):
        out = {"kind": "oracle", "variant": op.variant.value, "controlled": op.controlled}
        if op.control is not None:
            out["control"] = op.control
        out["target"] = op.target
        return out
    if isinstance(op, Adder):
        out = {"kind": "adder", "reg": op.reg, "shift": int(op.shift)}
        if op.control is not None:
            out["control"] = op.control
        return out
    if isinstance(op, CSwap):
        return {"kind": "cswap", "control": op.control, "a": op.a, "b": op.b}
    raise TypeError(f"cannot serialise op of type {type(op).__name__}")


def circuit_to_dict(c: Circuit) -> dict:
    # traced is kept in layout order so output is deterministic
    traced = [r.name for r in c.layout.registers if r.name in c.layout.traced]
    return {
        "registers": [{"name": r.name, "dim": int(r.dim), "role": r.role} for r in c.layout.registers],
        "traced": traced,
        "ops": [_op_to_dict(op) for op in c.ops],
    }


def dumps_circuit(c: Circuit) -> str:
    return json.dumps(circuit_to_dict(c), indent=1)


def loads_circuit(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    return circuit_from_dict(doc)


def roundtrip(c: Circuit) -> Circuit:
    return loads_circuit(dumps_circuit(c))


def load_circuit(path) -> Circuit:
    return loads_circuit(Path(path).read_text(encoding="utf-8"))


def save_circuit(c: Circuit, path) -> None:
    Path(path).write_text(dumps_circuit(c) + "\n", encoding="utf-8")


# --- oracle bindings -------------------------------------------------------

def oracle_from_dict(doc: Any):
    from .simulator import OracleBinding

    _check_keys(doc, {"dim", "matrix"}, {"phase"}, "oracle")
    d = _parse_int(doc["dim"], "oracle.dim")
    u = parse_matrix(doc["matrix"], "oracle.matrix")
    if u.shape != (d, d):
        raise ParseError(f"oracle.matrix: shape {u.shape} does not match dim {d}")
    if not is_unitary(u, UNITARY_TOL):
        raise ParseError("oracle.matrix: not unitary within 1e-10")
    phase = _parse_complex(doc.get("phase", [1.0, 0.0]), "oracle.phase")
    if abs(abs(phase) - 1.0) > 1e-12:
        raise ParseError(f"oracle.phase: modulus {abs(phase)!r} is not 1")
    return OracleBinding(u, phase)


def oracle_to_dict(b) -> dict:
    phase = complex(b.phase)
    return {"dim": int(b.u.shape[0]), "matrix": dump_matrix(b.u), "phase": [phase.real, phase.imag]}


def loads_oracle(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"invalid JSON: {e}") from None
    return oracle_from_dict(doc)


def load_oracle(path):
    return loads_oracle(Path(path).read_text(encoding="utf-8"))


def save_oracle(b, path) -> None:
    Path(path).write_text(json.dumps(oracle_to_dict(b), indent=1) + "\n", encoding="utf-8")
