"""Command line interface: solve, hpm, compare, residual, expand.

Exit codes: 0 success or check passed, 2 input error, 3 check failed,
4 internal error.  Output is deterministic for fixed inputs and seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import PdeSeriesError
from .expr import SamplePlan
from .hpm import partial_sum, solve_hpm
from .parser import load_problem, parse_expr, print_expr
from .series import TimeSeriesVec, expand_in_time
from .taylor import solve_taylor
from .verify import equivalence_check, residual_check

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CHECK_FAILED = 3
EXIT_INTERNAL = 4


def _add_common(sp: argparse.ArgumentParser, with_problem: bool = True) -> None:
    if with_problem:
        sp.add_argument("problem", help="path to a JSON problem file")
    sp.add_argument("--seed", type=int, default=42,
                    help="seed for the sampled-equality oracle (default 42)")
    sp.add_argument("--tolerance", type=float, default=1e-9,
                    help="relative tolerance of the oracle (default 1e-9)")
    sp.add_argument("--format", dest="output_format", choices=("text", "json"),
                    default="text", help="output format")


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(
        prog="pdeseries",
        description="Truncated time power series for linear vector PDE systems: "
                    "direct recursion, perturbation corrections, and cross checks.",
    )
    sub = root.add_subparsers(dest="command", required=True)

    solve = sub.add_parser(
        "solve",
        help="compute the series by the direct recursion and report exact termination",
    )
    _add_common(solve)
    solve.add_argument("--order", type=int, default=None,
                       help="override the truncation order from the file "
                            "(order N keeps coefficients 0..N)")

    hpm = sub.add_parser("hpm", help="compute perturbation corrections and their sum")
    _add_common(hpm)
    hpm.add_argument("--corrections", type=int, required=True,
                     help="number of corrections beyond the zeroth (>= 0)")

    compare = sub.add_parser(
        "compare",
        help="check the two engines agree coefficient-wise up to degree 2J+1",
    )
    _add_common(compare)
    compare.add_argument("--corrections", type=int, required=True,
                         help="number of corrections J (>= 1)")

    residual = sub.add_parser(
        "residual",
        help="check the direct solution satisfies the equation through degree N-2",
    )
    _add_common(residual)
    residual.add_argument("--order", type=int, default=None,
                          help="override the truncation order from the file")

    expand = sub.add_parser(
        "expand", help="expand a single expression about time zero"
    )
    expand.add_argument("--expr", required=True,
                        help="expression over x1..xn and t")
    expand.add_argument("--order", type=int, required=True,
                        help="highest coefficient degree to report (>= 0)")
    expand.add_argument("--dim", type=int, default=3,
                        help="spatial dimension for variable validation (default 3)")
    expand.add_argument("--format", dest="output_format", choices=("text", "json"),
                        default="text", help="output format")

    return root


def _render_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _series_lines(series: TimeSeriesVec, label: str, indent: str = "") -> list[str]:
    lines = []
    for j in range(series.order + 1):
        vec = series.coefficient(j)
        if series.m == 1:
            lines.append(f"{indent}{label}[{j}] = {print_expr(vec[0])}")
        else:
            for k in range(series.m):
                lines.append(f"{indent}{label}[{j}][{k}] = {print_expr(vec[k])}")
    return lines


def _series_payload(series: TimeSeriesVec) -> list[list[str]]:
    return [
        [print_expr(c) for c in series.coefficient(j)]
        for j in range(series.order + 1)
    ]


def _cmd_solve(args) -> int:
    problem = load_problem(args.problem)
    if args.order is not None:
        problem = problem.with_order(args.order)
    plan = SamplePlan(seed=args.seed, tolerance=args.tolerance)
    solution = solve_taylor(problem, plan)
    verdict = (
        f"exact ({solution.exact_reason})" if solution.exact else "not exact"
    )
    if args.output_format == "json":
        sys.stdout.write(_render_json({
            "order": problem.order,
            "m": problem.m,
            "coefficients": _series_payload(solution.series),
            "exact": solution.exact,
            "exact_reason": solution.exact_reason,
        }))
    else:
        for line in _series_lines(solution.series, "u"):
            print(line)
        print(f"verdict: {verdict}")
    return EXIT_OK


def _cmd_hpm(args) -> int:
    problem = load_problem(args.problem)
    if args.corrections < 0:
        raise ValueError("--corrections must be >= 0")
    expansion = solve_hpm(problem, args.corrections)
    total = partial_sum(expansion, expansion.working_order)
    if args.output_format == "json":
        sys.stdout.write(_render_json({
            "corrections": [
                _series_payload(c) for c in expansion.corrections
            ],
            "partial_sum": _series_payload(total),
            "working_order": expansion.working_order,
        }))
    else:
        for j, correction in enumerate(expansion.corrections):
            print(f"correction {j}:")
            for line in _series_lines(correction, "u", indent="  "):
                print(line)
        print(f"partial sum (degrees 0..{expansion.working_order}):")
        for line in _series_lines(total, "u", indent="  "):
            print(line)
    return EXIT_OK


def _check_table(per_degree) -> list[str]:
    lines = ["degree  status    max_deviation"]
    for check in per_degree:
        status = "ok" if check.passed else "MISMATCH"
        lines.append(f"{check.degree:<7d} {status:<9s} {check.max_deviation:.3e}")
    return lines


def _cmd_compare(args) -> int:
    problem = load_problem(args.problem)
    if args.corrections < 1:
        raise ValueError("--corrections must be >= 1")
    plan = SamplePlan(seed=args.seed, tolerance=args.tolerance)
    report = equivalence_check(problem, args.corrections, plan)
    if args.output_format == "json":
        sys.stdout.write(_render_json(report.to_dict()))
    else:
        for line in _check_table(report.per_degree):
            print(line)
        print(f"overall: {'equivalent' if report.overall else 'MISMATCH'}")
    return EXIT_OK if report.overall else EXIT_CHECK_FAILED


def _cmd_residual(args) -> int:
    problem = load_problem(args.problem)
    if args.order is not None:
        problem = problem.with_order(args.order)
    plan = SamplePlan(seed=args.seed, tolerance=args.tolerance)
    solution = solve_taylor(problem, plan)
    report = residual_check(problem, solution.series, plan)
    if args.output_format == "json":
        sys.stdout.write(_render_json(report.to_dict()))
    else:
        for line in _check_table(report.per_degree):
            print(line)
        print(f"overall: {'pass' if report.overall else 'FAIL'}")
    return EXIT_OK if report.overall else EXIT_CHECK_FAILED


def _cmd_expand(args) -> int:
    if args.order < 0:
        raise ValueError("--order must be >= 0")
    if args.dim < 1:
        raise ValueError("--dim must be >= 1")
    expression = parse_expr(args.expr, args.dim, allow_time=True)
    coefficients = expand_in_time(expression, args.order)
    rendered = [print_expr(c) for c in coefficients]
    if args.output_format == "json":
        sys.stdout.write(_render_json({"coefficients": rendered}))
    else:
        print("[" + ", ".join(rendered) + "]")
    return EXIT_OK


_DISPATCH = {
    "solve": _cmd_solve,
    "hpm": _cmd_hpm,
    "compare": _cmd_compare,
    "residual": _cmd_residual,
    "expand": _cmd_expand,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _DISPATCH[args.command](args)
    except (PdeSeriesError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
