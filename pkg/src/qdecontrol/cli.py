"""Command-line interface.

Machine-readable results go to stdout as JSON, diagnostics to stderr. Exit
codes: 0 success, 1 validation or verification failure, 2 usage or parse
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .circuit import InvalidCircuitError, ensure_valid
from .demos import DEMOS, build_demo
from .fileio import ParseError, dump_matrix, dumps_circuit, load_circuit, load_oracle
from .harness import check_equivalence, run_property_suite
from .simulator import OracleBinding, output_density, run_pure
from .transform import DecontrolError, DecontrolVariant, decontrol, overhead_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _variant(args) -> DecontrolVariant:
    try:
        return DecontrolVariant.parse(args.variant, args.hold)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _emit(obj, out=None) -> None:
    text = json.dumps(obj, indent=1)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _load(args):
    c = ensure_valid(load_circuit(args.input))
    b = load_oracle(args.oracle) if getattr(args, "oracle", None) else None
    return c, b


def cmd_decontrol(args) -> int:
    c = ensure_valid(load_circuit(args.input))
    dv = _variant(args)
    dc = decontrol(c, dv)
    text = dumps_circuit(dc)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        added = dc.layout.names[len(c.layout.names):]
        _emit({"out": args.out, "added_registers": added, "controlled_calls": dc.n_controlled,
               "overhead": overhead_report(c, dv).to_dict()})
    else:
        print(text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    c, b = _load(args)
    if b is not None:
        b = OracleBinding(b.u, b.phase * np.exp(1j * args.phase))
    if args.density:
        rho = output_density(c, b)
        _emit({
            "registers": [r.name for r in rho.registers],
            "density": dump_matrix(rho.matrix),
            "marginals": {r.name: rho.marginal(r.name).tolist() for r in rho.registers},
        }, args.out)
    else:
        psi = run_pure(c, b)
        _emit({"registers": c.layout.names, "state": [[z.real, z.imag] for z in psi]}, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    c, b = _load(args)
    if b is None:
        raise UsageError("verify needs --oracle")
    dv = _variant(args)
    dc = ensure_valid(load_circuit(args.decontrolled)) if args.decontrolled else None
    report = check_equivalence(c, b.u, dv, q=args.q, tol=args.tol, decontrolled=dc)
    _emit(report.to_dict(), args.out)
    if not report.passed:
        print(f"verify: trace distance {report.trace_distance:.3e} exceeds tolerance {report.tolerance:g}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_demo(args) -> int:
    _emit(build_demo(args.name).result.to_dict(), args.out)
    return EXIT_OK


def cmd_count(args) -> int:
    c = ensure_valid(load_circuit(args.input))
    _emit(overhead_report(c, _variant(args)).to_dict(), args.out)
    return EXIT_OK


def cmd_suite(args) -> int:
    try:
        dims = [int(x) for x in args.dims.split(",")]
    except ValueError:
        raise UsageError(f"bad --dims {args.dims!r}") from None
    summary = run_property_suite(args.seed, args.trials, args.max_n, dims)
    _emit(summary, args.out)
    failed = [p["name"] for p in summary["properties"] if p["fail"]]
    if failed:
        print(f"suite: failing properties {failed}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdecontrol", description="Remove controlled oracle calls from circuits.")
    sub = p.add_subparsers(dest="verb", required=True)

    def variant_flags(sp):
        sp.add_argument("--variant", default="full", help="full | no-counter | period:<p> (default full)")
        sp.add_argument("--hold", default="auto", choices=["both", "h", "ht", "auto"])

    sp = sub.add_parser("decontrol", help="rewrite a circuit without controlled oracle calls")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")
    variant_flags(sp)
    sp.set_defaults(fn=cmd_decontrol)

    sp = sub.add_parser("simulate", help="evaluate a circuit under an oracle")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--oracle")
    sp.add_argument("--phase", type=float, default=0.0, help="extra oracle phase in radians")
    sp.add_argument("--density", action="store_true", help="print the traced density instead of the pure state")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("verify", help="compare the decontrolled output with its phase-averaged reference")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--oracle", required=True)
    sp.add_argument("--q", type=int, default=None, help="phase group order (default n+1, or p for period:<p>)")
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--decontrolled", help="use this already decontrolled circuit instead of transforming --in")
    sp.add_argument("--out")
    variant_flags(sp)
    sp.set_defaults(fn=cmd_verify)

    sp = sub.add_parser("demo", help="run a built-in demonstration")
    sp.add_argument("name", choices=DEMOS)
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_demo)

    sp = sub.add_parser("count", help="report the overhead of decontrolling a circuit")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")
    variant_flags(sp)
    sp.set_defaults(fn=cmd_count)

    sp = sub.add_parser("suite", help="run the seeded randomized property suite")
    sp.add_argument("--seed", type=int, default=7)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--max-n", type=int, default=3)
    sp.add_argument("--dims", default="2,3,4")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        return args.fn(args)
    except (ParseError, UsageError, DecontrolError) as e:
        print(f"{args.verb}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as e:
        print(f"{args.verb}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidCircuitError as e:
        print(f"{args.verb}: invalid circuit: {e}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as e:
        print(f"{args.verb}: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
