"""Remove controlled oracle calls from quantum circuits and check the result by exact simulation."""

from .circuit import Adder, Circuit, CSwap, Gate, OracleCall, Register, RegisterLayout, Variant, validate
from .harness import check_equivalence, run_property_suite
from .simulator import OracleBinding, PhaseGroup, output_density, phase_avg_output, run_pure
from .transform import FULL, NO_COUNTER, DecontrolVariant, Hold, Period, decontrol, overhead_report

__all__ = [
    "Adder", "Circuit", "CSwap", "Gate", "OracleCall", "Register", "RegisterLayout", "Variant", "validate",
    "check_equivalence", "run_property_suite",
    "OracleBinding", "PhaseGroup", "output_density", "phase_avg_output", "run_pure",
    "FULL", "NO_COUNTER", "DecontrolVariant", "Hold", "Period", "decontrol", "overhead_report",
]
