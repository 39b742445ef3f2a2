"""Command line entry point.

Verbs: ``annuity``, ``totalise``, ``salvage``, ``weights``, ``solve``,
``compare``, ``bias``. Every verb accepts ``--format {text,json,csv}`` for
standard output, ``--out DIR`` to also write ``report.json``/``report.csv``
and ``--tolerance``.

Exit codes (failures print one JSON line on stderr)::

    0  success (solve: OPTIMAL)
    1  compare --check found a failing verdict
    2  usage error / malformed number
    3  scenario validation error
    4  INFEASIBLE
    5  UNBOUNDED
    6  solver failure (pivots or iterations exhausted)
    7  cannot read input or write output
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Optional, Sequence

from . import __version__
from .analysis import certify_equivalence, quantify_milestone_bias
from .errors import ValidationError
from .finance import DiscountRate, TechnologyParams, annualise, salvage_value, totalise
from .horizon import derive_milestone_weights
from .model import ObjectiveVariant, cost_breakdown, solve_scenario
from .reports import bias_section, equivalence_section, run_report, to_csv, to_json, write_reports
from .scenario_file import load_scenario
from .simplex import SolverOptions, Status

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_INFEASIBLE = 4
EXIT_UNBOUNDED = 5
EXIT_SOLVER_FAILURE = 6
EXIT_IO = 7

STATUS_EXIT = {
    Status.OPTIMAL: EXIT_OK,
    Status.INFEASIBLE: EXIT_INFEASIBLE,
    Status.UNBOUNDED: EXIT_UNBOUNDED,
    Status.SOLVER_FAILURE: EXIT_SOLVER_FAILURE,
}


class CliError(Exception):
    def __init__(self, kind: str, code: int, message: str):
        super().__init__(message)
        self.kind = kind
        self.code = code


def _diagnostic(kind: str, code: int, message: str) -> None:
    print(json.dumps({"error": kind, "exit_code": code, "message": message}), file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D401 - argparse hook
        _diagnostic("usage", EXIT_USAGE, f"{self.prog}: {message}")
        raise SystemExit(EXIT_USAGE)


def _number(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != value or value in (float("inf"), float("-inf")):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def _rate(text: str) -> DiscountRate:
    try:
        return DiscountRate.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _count(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0: {text!r}")
    return value


def _positive(text: str) -> int:
    value = _count(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def _variant(text: str) -> ObjectiveVariant:
    try:
        return ObjectiveVariant.parse(text)
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text",
                        help="standard output format (default: text, 2 decimals)")
    common.add_argument("--out", metavar="DIR",
                        help="also write report.json, report.csv and meta.json to DIR")
    common.add_argument("--tolerance", type=_number, default=None,
                        help="equivalence threshold (compare) or solver feasibility "
                             "tolerance (solve, bias)")

    parser = _Parser(prog="capplan", description="Multi-year investment cost discounting toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("annuity", parents=[common], help="annualise an overnight cost")
    p.add_argument("total_cost", type=_number)
    p.add_argument("wacc", type=_rate)
    p.add_argument("lifetime", type=_positive)

    p = sub.add_parser("totalise", parents=[common], help="overnight cost of a constant annuity")
    p.add_argument("annualised_cost", type=_number)
    p.add_argument("wacc", type=_rate)
    p.add_argument("lifetime", type=_positive)

    p = sub.add_parser("salvage", parents=[common], help="salvage value past the last modelled year")
    p.add_argument("total_cost", type=_number)
    p.add_argument("wacc", type=_rate)
    p.add_argument("lifetime", type=_positive)
    p.add_argument("invest_year", type=_count)
    p.add_argument("last_year", type=_count)

    p = sub.add_parser("weights", parents=[common], help="milestone weights for a horizon")
    p.add_argument("last_year", type=_count)
    p.add_argument("milestones", type=_count, nargs="+")

    p = sub.add_parser("solve", parents=[common], help="build and solve a scenario")
    p.add_argument("scenario")
    p.add_argument("--variant", type=_variant, default=ObjectiveVariant.ANNUALISED_MILESTONE)

    p = sub.add_parser("compare", parents=[common], help="certify equivalence of two variants")
    p.add_argument("scenario")
    p.add_argument("variant_a", type=_variant, nargs="?", default=ObjectiveVariant.ANNUALISED_MILESTONE)
    p.add_argument("variant_b", type=_variant, nargs="?", default=ObjectiveVariant.TOTAL_SALVAGE_MILESTONE)
    p.add_argument("--check", action="store_true", help="exit 1 when the verdict is fail")

    p = sub.add_parser("bias", parents=[common], help="milestone-weighting bias report")
    p.add_argument("scenario")
    return parser


def _emit(args, doc: dict[str, Any], text_lines: Sequence[str], argv: Sequence[str]) -> None:
    if args.format == "json":
        sys.stdout.write(to_json(doc))
    elif args.format == "csv":
        sys.stdout.write(to_csv(doc))
    else:
        for line in text_lines:
            print(line)
    if args.out:
        try:
            write_reports(args.out, doc, list(argv))
        except OSError as exc:
            raise CliError("io", EXIT_IO, f"cannot write reports to {args.out}: {exc}") from exc


def _scalar(args, argv, command: str, quantity: str, value: float, inputs: dict) -> int:
    doc = {"command": command, "inputs": inputs, "result": {quantity: value}}
    _emit(args, doc, [f"{value:.2f}"], argv)
    return EXIT_OK


def _load(path: str):
    try:
        return load_scenario(path)
    except OSError as exc:
        raise CliError("io", EXIT_IO, f"cannot read {path}: {exc}") from exc


def _options(args) -> Optional[SolverOptions]:
    if args.tolerance is None:
        return None
    return SolverOptions(feasibility_tol=args.tolerance)


def _cmd_solve(args, argv) -> int:
    scenario = _load(args.scenario)
    lp, solution = solve_scenario(scenario, args.variant, _options(args))
    breakdown = cost_breakdown(scenario, args.variant, solution) if solution.optimal else None
    doc = run_report("solve", lp, solution, breakdown)
    lines = [f"status: {solution.status.value}"]
    if breakdown is not None:
        lines += [
            f"objective: {solution.objective:.2f}",
            f"investment cost: {breakdown.total_investment:.2f}",
            f"operational cost: {breakdown.total_operational:.2f}",
            "investments:",
        ]
        lines += [f"  {tech} @ {m}: {level:.2f}" for (tech, m), level in solution.invest.items()]
    _emit(args, doc, lines, argv)
    code = STATUS_EXIT[solution.status]
    if code:
        _diagnostic(solution.status.value.lower(), code, f"{args.scenario}: {solution.status.value}")
    return code


def _cmd_compare(args, argv) -> int:
    scenario = _load(args.scenario)
    kwargs = {} if args.tolerance is None else {"threshold": args.tolerance}
    eq = certify_equivalence(scenario, args.variant_a, args.variant_b, **kwargs)
    bias = quantify_milestone_bias(scenario)
    doc = {
        "report_version": 1,
        "command": "compare",
        "equivalence": equivalence_section(eq),
        "bias": bias_section(bias),
    }
    lines = [
        f"{eq.variant_a.value} vs {eq.variant_b.value}: {eq.verdict}",
        f"  objective {eq.variant_a.value}: {eq.objective_a:.2f} ({eq.status_a.value})",
        f"  objective {eq.variant_b.value}: {eq.objective_b:.2f} ({eq.status_b.value})",
        f"  max coefficient deviation: {eq.max_coefficient_deviation:.3e}",
        f"  max objective deviation: {eq.max_objective_deviation:.3e}",
        f"  max milestone bias: {bias.max_abs_gap:.2f}",
    ]
    _emit(args, doc, lines, argv)
    return EXIT_CHECK_FAILED if args.check and not eq.passed else EXIT_OK


def _cmd_bias(args, argv) -> int:
    scenario = _load(args.scenario)
    bias = quantify_milestone_bias(scenario, options=_options(args))
    doc = {"report_version": 1, "command": "bias", "bias": bias_section(bias)}
    lines = ["investment coefficients (exact / annualised-milestone / total-salvage-milestone):"]
    for e in bias.investment:
        flag = f"  overcounts {e.overcounted_years} yr" if e.lifetime_gap else ""
        lines.append(
            f"  {e.tech} @ {e.milestone}: {e.exact:.2f} / {e.annualised_milestone:.2f} "
            f"/ {e.total_salvage_milestone:.2f}{flag}"
        )
    for o in bias.optimum:
        lines.append(
            f"optimum {o.variant.value}: {o.milestone_objective:.2f} vs exact "
            f"{o.exact_objective:.2f} (gap {o.gap:.2f})"
        )
    _emit(args, doc, lines, argv)
    return EXIT_OK


def _dispatch(args, argv) -> int:
    v = args.verb
    if v == "annuity":
        value = annualise(args.total_cost, args.wacc, args.lifetime)
        return _scalar(args, argv, v, "annualised_cost", value, {
            "total_cost": args.total_cost, "wacc": args.wacc.value, "lifetime": args.lifetime})
    if v == "totalise":
        value = totalise(args.annualised_cost, args.wacc, args.lifetime)
        return _scalar(args, argv, v, "total_cost", value, {
            "annualised_cost": args.annualised_cost, "wacc": args.wacc.value,
            "lifetime": args.lifetime})
    if v == "salvage":
        tech = TechnologyParams("asset", args.wacc, args.lifetime, overnight_cost=args.total_cost)
        value = salvage_value(tech, args.invest_year, args.last_year)
        return _scalar(args, argv, v, "salvage_value", value, {
            "total_cost": args.total_cost, "wacc": args.wacc.value, "lifetime": args.lifetime,
            "invest_year": args.invest_year, "last_year": args.last_year})
    if v == "weights":
        weights = derive_milestone_weights(args.milestones, args.last_year)
        doc = {"command": v, "last_year": args.last_year,
               "weights": [{"year": m, "weight": w} for m, w in zip(args.milestones, weights)]}
        _emit(args, doc, [" ".join(str(w) for w in weights)], argv)
        return EXIT_OK
    if v == "solve":
        return _cmd_solve(args, argv)
    if v == "compare":
        return _cmd_compare(args, argv)
    return _cmd_bias(args, argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args, argv)
    except CliError as exc:
        _diagnostic(exc.kind, exc.code, str(exc))
        return exc.code
    except ValidationError as exc:
        _diagnostic("validation", EXIT_VALIDATION, str(exc))
        return EXIT_VALIDATION
    except ValueError as exc:
        # domain errors on direct arguments, e.g. invest_year after last_year
        _diagnostic("usage", EXIT_USAGE, str(exc))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
