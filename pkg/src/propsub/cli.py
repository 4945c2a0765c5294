"""Command-line entry point: ``propsub solve|verify|gen|oracle``.

Exit codes: 0 success, 1 invalid input or parameters, 2 internal
certificate violation, 3 failed verification, 4 oracle budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .audit import DEFAULT_BUDGET, BudgetExceeded, brute_force_opt_subsidy
from .decomposition import PieceInvariantError
from .equilibrium import CertificateViolation, SolverInvariantError
from .generate import FAMILIES, MAX_SEED, generate
from .instance import InstanceError, format_rational, parse_instance, serialize_instance
from .pipeline import solve
from .report import ReportError, build_report, verify_report

log = logging.getLogger("propsub")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2
EXIT_VERIFY = 3
EXIT_BUDGET = 4


def _read(path: str | None) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _dump(doc) -> str:
    return json.dumps(doc, indent=2) + "\n"


def cmd_solve(args: argparse.Namespace) -> int:
    try:
        inst = parse_instance(_read(args.input))
    except (OSError, InstanceError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INPUT
    try:
        sol = solve(inst, jobs=args.jobs)
    except (CertificateViolation, SolverInvariantError, PieceInvariantError) as exc:
        log.error("internal certificate violation: %s", exc)
        return EXIT_INTERNAL
    _write(args.output, _dump(build_report(sol, decimal=args.decimal, dump_pieces=args.dump_pieces)))
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    try:
        doc = json.loads(_read(args.input))
        failed, message = verify_report(doc)
    except (OSError, json.JSONDecodeError, InstanceError, ReportError) as exc:
        log.error("unreadable report: %s", exc)
        return EXIT_INPUT
    if failed is not None:
        print(f"FAILED {failed}: {message}", file=sys.stderr)
        return EXIT_VERIFY
    print("OK")
    return EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    if args.n is None or args.m is None:
        log.error("gen requires --n and --m")
        return EXIT_INPUT
    try:
        inst = generate(args.family, args.n, args.m, args.seed)
    except ValueError as exc:
        log.error("invalid parameters: %s", exc)
        return EXIT_INPUT
    _write(args.output, serialize_instance(inst))
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    try:
        inst = parse_instance(_read(args.input))
    except (OSError, InstanceError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_INPUT
    try:
        sol = solve(inst, jobs=args.jobs)
        best, best_alloc = brute_force_opt_subsidy(sol.normalized_full, budget=args.budget, jobs=args.jobs)
    except BudgetExceeded as exc:
        log.error("%s", exc)
        return EXIT_BUDGET
    except (CertificateViolation, SolverInvariantError, PieceInvariantError) as exc:
        log.error("internal certificate violation: %s", exc)
        return EXIT_INTERNAL
    doc = {
        "oracle_subsidy": format_rational(best),
        "oracle_allocation": list(best_alloc.owner),
        "pipeline_subsidy": format_rational(sol.report.total),
        "pipeline_allocation": list(sol.allocation.owner),
        "gap": format_rational(sol.report.total - best),
        "bound": format_rational(sol.report.bound),
    }
    if args.decimal:
        doc["decimal"] = {
            "oracle_subsidy": float(best),
            "pipeline_subsidy": float(sol.report.total),
            "gap": float(sol.report.total - best),
        }
    _write(args.output, _dump(doc))
    return EXIT_OK


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= MAX_SEED:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="propsub", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", metavar="PATH", help="input file (default: stdin)")
    common.add_argument("--output", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--jobs", type=int, default=1, metavar="INT", help="worker count for piece rounding and oracle chunks")
    common.add_argument("--decimal", action="store_true", help="add approximate floats for reading")

    p = sub.add_parser("solve", parents=[common], help="solve an instance and write a report")
    p.add_argument("--dump-pieces", action="store_true", help="include the tree pieces in the report")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", parents=[common], help="re-check a saved report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", parents=[common], help="generate a seeded instance")
    p.add_argument("--family", choices=FAMILIES, default="uniform-rational")
    p.add_argument("--n", type=int, metavar="INT")
    p.add_argument("--m", type=int, metavar="INT")
    p.add_argument("--seed", type=_seed, default=0, metavar="U64")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", parents=[common], help="compare with the brute-force optimum")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, metavar="INT", help="maximum number of allocations to enumerate")
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
