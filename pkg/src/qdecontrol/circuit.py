"""Circuit data model: registers, fixed gates, oracle calls, adders and swaps.

Circuits are unitary op lists acting on ``|0...0>`` followed by a partial
trace over ``layout.traced``. Oracle calls are abstract; the concrete unitary
is only supplied at simulation time.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .linalg import UNITARY_TOL, is_unitary

ROLES = ("control", "target", "ancilla", "counter", "hold", "hold_transpose")
ORACLE_TARGETS = ("target", "hold", "hold_transpose")


class Variant(str, enum.Enum):
    """Which of ``U, U†, U*, Uᵀ`` an oracle call applies."""

    U = "U"
    U_DAG = "U_dag"
    U_CONJ = "U_conj"
    U_TRANS = "U_trans"

    def __str__(self) -> str:
        return self.value


def sigma(variant: Variant) -> int:
    """Exponent picked up by a unit phase: ``(phi*U)^variant = phi**sigma * U^variant``."""
    return +1 if Variant(variant) in (Variant.U, Variant.U_TRANS) else -1


def apply_variant(u, variant: Variant) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    variant = Variant(variant)
    if variant is Variant.U:
        return u
    if variant is Variant.U_DAG:
        return u.conj().T
    if variant is Variant.U_CONJ:
        return u.conj()
    return u.T


@dataclass(frozen=True)
class Register:
    name: str
    dim: int
    role: str = "ancilla"


@dataclass(frozen=True)
class RegisterLayout:
    registers: tuple[Register, ...]
    traced: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "registers", tuple(self.registers))
        object.__setattr__(self, "traced", frozenset(self.traced))

    @property
    def names(self) -> list[str]:
        return [r.name for r in self.registers]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(r.dim for r in self.registers)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims)) if self.registers else 1

    def index(self, name: str) -> int:
        for i, r in enumerate(self.registers):
            if r.name == name:
                return i
        raise KeyError(f"no register named {name!r}")

    def get(self, name: str) -> Register:
        return self.registers[self.index(name)]

    def by_role(self, role: str) -> list[Register]:
        return [r for r in self.registers if r.role == role]

    def role_register(self, role: str) -> Register:
        regs = self.by_role(role)
        if len(regs) != 1:
            raise KeyError(f"expected exactly one {role!r} register, found {len(regs)}")
        return regs[0]

    def kept(self) -> list[Register]:
        return [r for r in self.registers if r.name not in self.traced]


@dataclass(frozen=True, eq=False)
class Gate:
    """A fixed unitary on the named registers, in the listed order."""

    regs: tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "regs", tuple(self.regs))
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))

    def __eq__(self, other):
        if not isinstance(other, Gate):
            return NotImplemented
        return (
            self.regs == other.regs
            and self.matrix.shape == other.matrix.shape
            and bool(np.array_equal(self.matrix, other.matrix))
        )

    __hash__ = None


@dataclass(frozen=True)
class OracleCall:
    """A query to the black box, optionally controlled on a qubit register.

    ``target`` names a register *role*; the simulator applies the query to the
    unique register carrying that role.
    """

    variant: Variant = Variant.U
    controlled: bool = False
    control: Optional[str] = None
    target: str = "target"

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))


@dataclass(frozen=True)
class Adder:
    """``|k> -> |k + shift mod dim>`` on a counter, optionally controlled on ``control = |1>``."""

    reg: str
    shift: int
    control: Optional[str] = None


@dataclass(frozen=True)
class CSwap:
    control: str
    a: str
    b: str


Op = Union[Gate, OracleCall, Adder, CSwap]


@dataclass(frozen=True)
class Circuit:
    layout: RegisterLayout
    ops: tuple[Op, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))

    @property
    def oracle_calls(self) -> list[OracleCall]:
        return [op for op in self.ops if isinstance(op, OracleCall)]

    @property
    def controlled_calls(self) -> list[OracleCall]:
        return [op for op in self.ops if isinstance(op, OracleCall) and op.controlled]

    @property
    def n_queries(self) -> int:
        return len(self.oracle_calls)

    @property
    def n_controlled(self) -> int:
        return len(self.controlled_calls)

    @property
    def oracle_dim(self) -> Optional[int]:
        regs = self.layout.by_role("target")
        return regs[0].dim if len(regs) == 1 else None


@dataclass(frozen=True)
class Violation:
    op_index: Optional[int]
    message: str

    def __str__(self) -> str:
        where = "layout" if self.op_index is None else f"op {self.op_index}"
        return f"{where}: {self.message}"


class InvalidCircuitError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def _check_layout(layout: RegisterLayout, has_oracle: bool) -> list[Violation]:
    out = []
    seen = set()
    for r in layout.registers:
        if r.name in seen:
            out.append(Violation(None, f"duplicate register name {r.name!r}"))
        seen.add(r.name)
        if not isinstance(r.dim, (int, np.integer)) or r.dim < 1:
            out.append(Violation(None, f"register {r.name!r} has invalid dim {r.dim!r}"))
        if r.role not in ROLES:
            out.append(Violation(None, f"register {r.name!r} has unknown role {r.role!r}"))
        if r.role == "control" and r.dim != 2:
            out.append(Violation(None, f"control register {r.name!r} has dim {r.dim}, expected 2"))
    for t in sorted(layout.traced - seen):
        out.append(Violation(None, f"traced register {t!r} does not exist"))

    n_target = len(layout.by_role("target"))
    if has_oracle and n_target != 1:
        out.append(Violation(None, f"circuits with oracle calls need exactly one target register, found {n_target}"))
    elif n_target > 1:
        out.append(Violation(None, f"at most one target register allowed, found {n_target}"))
    for role in ("hold", "hold_transpose"):
        if len(layout.by_role(role)) > 1:
            out.append(Violation(None, f"at most one {role} register allowed"))
    return out


def _check_qubit(layout: RegisterLayout, i: int, name: Optional[str], what: str) -> list[Violation]:
    if name is None:
        return [Violation(i, f"{what} register missing")]
    if name not in layout.names:
        return [Violation(i, f"{what} register {name!r} does not exist")]
    if layout.get(name).dim != 2:
        return [Violation(i, f"{what} register {name!r} has dim {layout.get(name).dim}, expected 2")]
    return []


def validate(c: Circuit) -> list[Violation]:
    """Return every broken invariant of ``c``; an empty list means valid."""
    layout = c.layout
    out = _check_layout(layout, has_oracle=bool(c.oracle_calls))
    names = set(layout.names)
    targets = layout.by_role("target")
    d = targets[0].dim if len(targets) == 1 else None

    for i, op in enumerate(c.ops):
        if isinstance(op, Gate):
            missing = [r for r in op.regs if r not in names]
            if missing:
                out.append(Violation(i, f"gate names unknown registers {missing}"))
                continue
            if len(set(op.regs)) != len(op.regs):
                out.append(Violation(i, f"gate repeats a register in {list(op.regs)}"))
                continue
            dim = int(np.prod([layout.get(r).dim for r in op.regs])) if op.regs else 1
            if op.matrix.shape != (dim, dim):
                out.append(Violation(i, f"gate matrix has shape {op.matrix.shape}, registers {list(op.regs)} need ({dim}, {dim})"))
            elif not np.all(np.isfinite(op.matrix)):
                out.append(Violation(i, "gate matrix has non-finite entries"))
            elif not is_unitary(op.matrix, UNITARY_TOL):
                out.append(Violation(i, "gate matrix is not unitary"))
        elif isinstance(op, OracleCall):
            if op.target not in ORACLE_TARGETS:
                out.append(Violation(i, f"oracle target {op.target!r} is not one of {ORACLE_TARGETS}"))
                continue
            regs = layout.by_role(op.target)
            if len(regs) != 1:
                out.append(Violation(i, f"oracle target role {op.target!r} matches {len(regs)} registers"))
                continue
            treg = regs[0]
            if d is not None and treg.dim != d:
                out.append(Violation(i, f"oracle acts on {treg.name!r} of dim {treg.dim}, oracle dim is {d}"))
            if op.controlled:
                out.extend(_check_qubit(layout, i, op.control, "control"))
                if op.control == treg.name:
                    out.append(Violation(i, "oracle control and target coincide"))
            elif op.control is not None:
                out.append(Violation(i, "uncontrolled oracle call names a control register"))
        elif isinstance(op, Adder):
            if op.reg not in names:
                out.append(Violation(i, f"adder register {op.reg!r} does not exist"))
            elif layout.get(op.reg).role != "counter":
                out.append(Violation(i, f"adder register {op.reg!r} is not a counter"))
            if op.shift not in (1, -1):
                out.append(Violation(i, f"adder shift {op.shift!r} is not +1 or -1"))
            if op.control is not None:
                out.extend(_check_qubit(layout, i, op.control, "control"))
                if op.control == op.reg:
                    out.append(Violation(i, "adder control and counter coincide"))
        elif isinstance(op, CSwap):
            bad = [r for r in (op.control, op.a, op.b) if r not in names]
            if bad:
                out.append(Violation(i, f"cswap names unknown registers {bad}"))
                continue
            if len({op.control, op.a, op.b}) != 3:
                out.append(Violation(i, "cswap registers must be distinct"))
                continue
            out.extend(_check_qubit(layout, i, op.control, "control"))
            if layout.get(op.a).dim != layout.get(op.b).dim:
                out.append(Violation(i, f"cswap on registers of unequal dim {layout.get(op.a).dim} and {layout.get(op.b).dim}"))
        else:
            out.append(Violation(i, f"unknown op type {type(op).__name__}"))
    return out


def ensure_valid(c: Circuit) -> Circuit:
    violations = validate(c)
    if violations:
        raise InvalidCircuitError(violations)
    return c
