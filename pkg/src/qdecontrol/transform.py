"""Replace controlled oracle calls by uncontrolled gadgets.

Each controlled query ``C-U^v`` becomes::

    controlled Add(sigma(v)) on the counter K
    cswap(C: R <-> hold)
    U^v on the hold register (uncontrolled)
    cswap(C: R <-> hold)

where the hold register is ``H`` for ``U``/``U_dag`` and ``HT`` for
``U_conj``/``U_trans``. ``H`` and ``HT`` start in a maximally entangled pair
and ``K`` in ``|0>``; all added registers are traced out. After tracing, paths
with different phase weights decohere while equal-weight paths stay coherent,
so the output equals the oracle's phase-averaged output.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

from .circuit import (
    Adder,
    Circuit,
    CSwap,
    Gate,
    OracleCall,
    Register,
    RegisterLayout,
    Variant,
    ensure_valid,
    sigma,
)
from .linalg import entangler


class Hold(str, enum.Enum):
    BOTH = "both"
    H_ONLY = "h"
    HT_ONLY = "ht"
    AUTO = "auto"


@dataclass(frozen=True)
class Counter:
    """Counter policy: ``"full"`` (dim n+1), ``"none"``, or ``"period"`` with dim ``p``."""

    kind: str = "full"
    p: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("full", "none", "period"):
            raise ValueError(f"unknown counter kind {self.kind!r}")
        if self.kind == "period":
            if self.p is None or int(self.p) != self.p or self.p < 1:
                raise ValueError(f"period counter needs an integer p >= 1, got {self.p!r}")
        elif self.p is not None:
            raise ValueError(f"counter {self.kind!r} takes no period")

    def __str__(self) -> str:
        return f"period:{self.p}" if self.kind == "period" else ("no-counter" if self.kind == "none" else "full")


FULL = Counter("full")
NO_COUNTER = Counter("none")


def Period(p: int) -> Counter:
    return Counter("period", p)


@dataclass(frozen=True)
class DecontrolVariant:
    counter: Counter = FULL
    hold: Hold = Hold.AUTO

    def __post_init__(self):
        object.__setattr__(self, "hold", Hold(self.hold))

    @classmethod
    def parse(cls, counter: str = "full", hold: str = "auto") -> "DecontrolVariant":
        """Build from the CLI spellings ``full | no-counter | period:<p>`` and ``both | h | ht | auto``."""
        if counter == "full":
            c = FULL
        elif counter == "no-counter":
            c = NO_COUNTER
        elif counter.startswith("period:"):
            try:
                p = int(counter.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad period in {counter!r}") from None
            c = Period(p)
        else:
            raise ValueError(f"unknown counter variant {counter!r}")
        return cls(c, Hold(hold))

    def to_dict(self) -> dict:
        return {"counter": str(self.counter), "hold": self.hold.value}


class DecontrolError(ValueError):
    pass


_H_VARIANTS = (Variant.U, Variant.U_DAG)
_HT_VARIANTS = (Variant.U_CONJ, Variant.U_TRANS)


def hold_side(variant: Variant) -> str:
    """Hold role a gadget for ``variant`` applies the oracle on."""
    return "hold" if Variant(variant) in _H_VARIANTS else "hold_transpose"


def resolve_hold(c: Circuit, hold: Hold) -> Hold:
    """Turn ``AUTO`` into a concrete policy and reject policies the circuit cannot use.

    ``AUTO`` on a circuit without controlled calls resolves to ``AUTO`` itself,
    meaning no hold registers are added.
    """
    hold = Hold(hold)
    variants = {op.variant for op in c.controlled_calls}
    need_h = bool(variants & set(_H_VARIANTS))
    need_ht = bool(variants & set(_HT_VARIANTS))
    if hold is Hold.AUTO:
        if need_h and need_ht:
            return Hold.BOTH
        if need_h:
            return Hold.H_ONLY
        if need_ht:
            return Hold.HT_ONLY
        return Hold.AUTO
    if hold is Hold.H_ONLY and need_ht:
        raise DecontrolError("hold=h drops HT, but the circuit has controlled U_conj/U_trans calls")
    if hold is Hold.HT_ONLY and need_h:
        raise DecontrolError("hold=ht drops H, but the circuit has controlled U/U_dag calls")
    return hold


def counter_dim(c: Circuit, counter: Counter) -> Optional[int]:
    """Dimension of the added counter, or ``None`` if no counter is added."""
    if counter.kind == "none":
        return None
    if counter.kind == "period":
        return counter.p
    n = c.n_controlled
    return n + 1 if n > 0 else None


def _fresh(name: str, taken: set[str]) -> str:
    if name not in taken:
        taken.add(name)
        return name
    i = 1
    while f"{name}{i}" in taken:
        i += 1
    taken.add(f"{name}{i}")
    return f"{name}{i}"


@dataclass(frozen=True)
class AddedRegisters:
    """Names of the registers ``decontrol`` appends (``None`` when absent).

    ``purifier`` is only present under a one-sided hold policy: it stands in
    the slot of the dropped partner, is entangled with the remaining hold
    register at the start and never touched afterwards, so the hold register
    behaves as maximally mixed.
    """

    counter: Optional[str] = None
    hold: Optional[str] = None
    hold_transpose: Optional[str] = None
    purifier: Optional[str] = None

    def pair(self) -> Optional[tuple[str, str]]:
        """The two d-dimensional registers prepared in a maximally entangled state."""
        first = self.hold if self.hold is not None else self.purifier
        second = self.hold_transpose if self.hold_transpose is not None else self.purifier
        if first is None or second is None:
            return None
        return first, second


def build_gadget(variant: Variant, dv: DecontrolVariant, control: str, target: str, hold: str, counter: Optional[str]):
    """Op list replacing one controlled call ``C-U^variant``.

    ``target`` and ``hold`` are register names; ``hold`` must be the register
    playing the hold role matching ``variant`` (``H`` for ``U``/``U_dag``,
    ``HT`` otherwise). ``counter`` is the counter register name or ``None``.
    """
    variant = Variant(variant)
    if hold is None:
        raise DecontrolError(f"no hold register available for a controlled {variant.value} call")
    ops = []
    if counter is not None and dv.counter.kind != "none":
        ops.append(Adder(counter, sigma(variant), control))
    ops.append(CSwap(control, target, hold))
    ops.append(OracleCall(variant, False, None, hold_side(variant)))
    ops.append(CSwap(control, target, hold))
    return ops


def plan_registers(c: Circuit, dv: DecontrolVariant) -> tuple[list[Register], AddedRegisters]:
    hold = resolve_hold(c, dv.hold)
    taken = set(c.layout.names)
    d = c.oracle_dim
    new: list[Register] = []
    names = {}

    kdim = counter_dim(c, dv.counter)
    if kdim is not None:
        names["counter"] = _fresh("K", taken)
        new.append(Register(names["counter"], kdim, "counter"))
    if hold is Hold.AUTO or d is None:
        return new, AddedRegisters(**names)

    if hold in (Hold.BOTH, Hold.H_ONLY):
        names["hold"] = _fresh("H", taken)
    if hold in (Hold.BOTH, Hold.HT_ONLY):
        names["hold_transpose"] = _fresh("HT", taken)
    if hold is not Hold.BOTH:
        names["purifier"] = _fresh("HP", taken)

    if hold is Hold.BOTH:
        new += [Register(names["hold"], d, "hold"), Register(names["hold_transpose"], d, "hold_transpose")]
    elif hold is Hold.H_ONLY:
        new += [Register(names["hold"], d, "hold"), Register(names["purifier"], d, "ancilla")]
    else:
        new += [Register(names["purifier"], d, "ancilla"), Register(names["hold_transpose"], d, "hold_transpose")]
    return new, AddedRegisters(**names)


def decontrol(c: Circuit, dv: Optional[DecontrolVariant] = None) -> Circuit:
    """Rewrite ``c`` so that it contains no controlled oracle calls.

    Gates and uncontrolled calls pass through unchanged. With the full
    counter the traced output equals the average of ``c``'s output over the
    oracle phase ``phi`` in ``C_q`` for any ``q > n``. For oracles with
    ``u**p = I`` a period-``p`` counter gives the ``C_p`` average instead;
    that condition is not checked here.
    """
    dv = dv or DecontrolVariant()
    ensure_valid(c)
    new_regs, added = plan_registers(c, dv)
    if not new_regs:
        return c

    layout = RegisterLayout(
        c.layout.registers + tuple(new_regs),
        c.layout.traced | {r.name for r in new_regs},
    )
    ops = []
    pair = added.pair()
    if pair is not None:
        ops.append(Gate(pair, entangler(c.oracle_dim)))

    target = c.layout.role_register("target").name if c.oracle_calls else None
    for op in c.ops:
        if isinstance(op, OracleCall) and op.controlled:
            hold = added.hold if hold_side(op.variant) == "hold" else added.hold_transpose
            ops.extend(build_gadget(op.variant, dv, op.control, target, hold, added.counter))
        else:
            ops.append(op)
    return ensure_valid(Circuit(layout, tuple(ops)))


@dataclass(frozen=True)
class GadgetCost:
    cswaps: int
    adders: int
    oracle_calls: int


@dataclass(frozen=True)
class OverheadReport:
    extra_qubits: int
    extra_gate_count: int
    gadget_count: int
    per_gadget: GadgetCost
    counter_dim: Optional[int] = None
    hold_registers: int = 0

    def to_dict(self) -> dict:
        return {
            "extra_qubits": self.extra_qubits,
            "extra_gate_count": self.extra_gate_count,
            "gadget_count": self.gadget_count,
            "per_gadget": {
                "cswaps": self.per_gadget.cswaps,
                "adders": self.per_gadget.adders,
                "oracle_calls": self.per_gadget.oracle_calls,
            },
            "counter_dim": self.counter_dim,
            "hold_registers": self.hold_registers,
        }


def qubits_for(dim: int) -> int:
    return math.ceil(math.log2(dim)) if dim > 1 else 0


def overhead_report(c: Circuit, dv: Optional[DecontrolVariant] = None) -> OverheadReport:
    """Space and gate overhead of ``decontrol(c, dv)``.

    The purifier register used to model a maximally mixed hold register is
    bookkeeping for pure-state simulation and is not counted.
    """
    dv = dv or DecontrolVariant()
    ensure_valid(c)
    n = c.n_controlled
    if n == 0:
        return OverheadReport(0, 0, 0, GadgetCost(0, 0, 0))
    kdim = counter_dim(c, dv.counter)
    hold = resolve_hold(c, dv.hold)
    n_hold = {Hold.BOTH: 2, Hold.H_ONLY: 1, Hold.HT_ONLY: 1}.get(hold, 0)
    d = c.oracle_dim
    adders = 1 if kdim is not None else 0
    extra_qubits = (qubits_for(kdim) if kdim is not None else 0) + n_hold * qubits_for(d)
    return OverheadReport(
        extra_qubits=extra_qubits,
        extra_gate_count=n * (2 + adders),
        gadget_count=n,
        per_gadget=GadgetCost(2, adders, 1),
        counter_dim=kdim,
        hold_registers=n_hold,
    )
