"""Command line entry point: ``qkint run`` and ``qkint validate``."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from . import __version__
from .errors import DomainError
from .scenario import ScenarioError, emit_report, parse_scenario, run_scenario

log = logging.getLogger("qkint")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qkint", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qkint {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario and report every check")
    run.add_argument("scenario")
    run.add_argument("--report", help="write the JSON report here")
    run.add_argument("--tolerance", type=float, help="override the solver tolerance")
    run.add_argument("--seed", type=int, help="override the scenario seed")
    run.add_argument("--timing", action="store_true", help="include wall-clock time in the report")

    val = sub.add_parser("validate", help="parse and validate a scenario without running it")
    val.add_argument("scenario")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        scenario = parse_scenario(args.scenario)
    except ScenarioError as exc:
        for problem in exc.problems:
            print(f"error: {problem}", file=sys.stderr)
        return EXIT_INVALID

    if args.command == "validate":
        print(f"ok: {args.scenario} ({scenario.kind})")
        return EXIT_OK

    if args.tolerance is not None:
        try:
            scenario = replace(scenario, config=replace(scenario.config, tolerance=args.tolerance))
        except DomainError as exc:
            print(f"error: --tolerance: {exc}", file=sys.stderr)
            return EXIT_INVALID
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)

    report = run_scenario(scenario)
    for rec in report.checks:
        status = "PASS" if rec.passed else "FAIL"
        detail = rec.error or (f"residual={rec.residual:.3e}" if isinstance(rec.residual, float) else "")
        print(f"{status}  {rec.name:32s} {detail}")
    log.info("%d checks in %.3fs", len(report.checks), report.duration)
    if args.report:
        try:
            emit_report(report, args.report, include_timing=args.timing)
        except OSError as exc:
            print(f"error: cannot write report: {exc}", file=sys.stderr)
            return EXIT_INVALID
    return EXIT_OK if report.passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
