"""Command line front end: solve band specs, run demos and verify stored solutions.

Exit codes are 0 on success, 1 for input or configuration errors and 2 when a
verification check fails or the solver does not converge.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
from numpy.typing import NDArray

from band_model_lfd_package.artifacts import (
    LFD_CSV,
    REPORT_JSON,
    SOLUTION_JSON,
    SPEC_JSON,
    read_solution,
    read_solver_tol,
    write_json,
    write_lfd_csv,
    write_report_json,
    write_solution_json,
)
from band_model_lfd_package.bands import BAND_TOL, contains, sample_feasible_pairs
from band_model_lfd_package.criteria import (
    CriteriaConfig,
    bounds_attained,
    check_bound_attainment,
    check_l_dominance,
    check_stochastic_dominance,
    log_lambda_grid,
)
from band_model_lfd_package.data_models import RunReport
from band_model_lfd_package.demos import DEMOS, demo_reference_columns, demo_spec
from band_model_lfd_package.errors import BandModelError, InvalidParameterError, MaxIterationsExceededError
from band_model_lfd_package.solver import SolverConfig, fixed_point_residual, solve_lfds
from band_model_lfd_package.spec_file import BandSpec, load_band_spec, parse_band_spec
from band_model_lfd_package.statistic import build_ratio, classify_regions, export_figure_data, ratio_level_defect

if TYPE_CHECKING:
    from band_model_lfd_package.data_models import LfdSolution

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_VERIFICATION_FAILED = 2

DEFAULT_LAMBDA_GRID = "0.05:20:20"
DEFAULT_SAMPLES = 100
DEFAULT_SEED = 0
RESIDUAL_FACTOR = 10.0
GRID_FLAG_PARTS = 3


def parse_range(text: str, *, log: bool) -> NDArray[np.float64]:
    """Parse a ``lo:hi:n`` flag into a log or linearly spaced grid."""
    parts = text.split(":")
    if len(parts) != GRID_FLAG_PARTS:
        msg = f"Expected lo:hi:n, got {text!r}."
        raise InvalidParameterError(msg)
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        msg = f"Expected lo:hi:n with numbers, got {text!r}."
        raise InvalidParameterError(msg) from exc
    if log:
        return log_lambda_grid(lo, hi, n)
    if not (0 <= lo <= hi and np.isfinite(hi)) or n < 1:
        msg = f"Invalid grid {text!r}."
        raise InvalidParameterError(msg)
    return np.linspace(lo, hi, n)


def solver_config_from_args(args: argparse.Namespace, stored_tol: float | None = None) -> SolverConfig:
    """Map solver flags onto a SolverConfig.

    An unset ``--tol`` falls back to ``stored_tol`` and then to the default.
    """
    tol = args.tol if args.tol is not None else stored_tol
    return SolverConfig(
        alpha=args.alpha,
        tol=SolverConfig.tol if tol is None else tol,
        max_iter=args.max_iter,
        auto_alpha=not args.no_auto_alpha,
    )


def _check_table(checks: dict[str, bool]) -> str:
    width = max((len(name) for name in checks), default=0)
    lines = [f"{'check':<{width}}  result"]
    lines += [f"{name:<{width}}  {'PASS' if ok else 'FAIL'}" for name, ok in checks.items()]
    return "\n".join(lines) + "\n"


def verify_solution(
    sol: LfdSolution,
    spec: BandSpec,
    args: argparse.Namespace,
    cfg: SolverConfig,
) -> tuple[dict[str, bool], dict[str, Any], list[str]]:
    """Run the verification suite on a solution.

    Args:
        sol: Solution to verify
        spec: Parsed bands the solution belongs to
        args: Parsed command line flags
        cfg: Solver settings the solution was computed with

    Returns:
        Pass flags per check, detailed records and notes
    """
    band0, band1 = spec.band0, spec.band1
    criteria = CriteriaConfig()
    lambdas = parse_range(args.lambda_grid, log=True)
    etas = parse_range(args.eta_grid, log=False) if args.eta_grid else None
    notes: list[str] = []

    residual = fixed_point_residual(sol, band0, band1)
    tv_steps = np.diff(np.asarray(sol.tv_history, dtype=np.float64))
    checks = {
        "feasible": contains(band0, sol.q0, BAND_TOL) and contains(band1, sol.q1, BAND_TOL),
        "fixed_point_residual": residual <= RESIDUAL_FACTOR * cfg.tol,
        "tv_monotone": bool(np.all(tv_steps <= cfg.tv_slack)),
    }
    ratio_defect = ratio_level_defect(build_ratio(sol), sol)
    if ratio_defect > cfg.ratio_tol:
        notes.append(f"Likelihood ratio is {ratio_defect:.3e} off the admissible levels (ratio_tol {cfg.ratio_tol:g}).")
    records = check_bound_attainment(sol, band0, band1, lambdas)
    checks["bound_attainment"] = bounds_attained(records, criteria)
    details: dict[str, Any] = {
        "fixed_point_residual": residual,
        "ratio_level_defect": ratio_defect,
        "bound_attainment": [asdict(record) for record in records],
    }

    if args.samples > 0:
        pairs = sample_feasible_pairs(band0, band1, args.samples, args.seed)
        optimality = check_l_dominance(
            sol, band0, band1, lambdas, args.samples, args.seed, config=criteria, pairs=pairs
        )
        dominance = check_stochastic_dominance(
            sol, band0, band1, etas, args.samples, args.seed, config=criteria, pairs=pairs
        )
        checks["l_dominance"] = optimality.dominance_pass
        checks["stochastic_dominance"] = dominance.passed
        details["l_dominance"] = asdict(optimality)
        details["stochastic_dominance"] = asdict(dominance)
    else:
        notes.append("No samples requested; sampled dominance checks skipped.")
    return checks, details, notes


def _solve_and_write(
    spec: BandSpec,
    out_dir: Path,
    args: argparse.Namespace,
    extra: dict[str, NDArray[np.float64]] | None = None,
) -> RunReport:
    cfg = solver_config_from_args(args)
    notes = []
    try:
        sol = solve_lfds(spec.band0, spec.band1, cfg)
    except MaxIterationsExceededError as exc:
        logger.warning("%s", exc)
        sol = exc.partial
        notes.append(str(exc))
    if sol.alpha_escalated:
        notes.append(f"No clip constant at alpha={cfg.alpha:g}; solved with alpha={sol.alpha:g}.")

    rt = build_ratio(sol)
    classification = classify_regions(rt)
    table = export_figure_data(sol, rt, extra)
    checks, details, check_notes = verify_solution(sol, spec, args, cfg)
    checks["converged"] = sol.converged
    details["classification"] = asdict(classification)

    out_dir.mkdir(parents=True, exist_ok=True)
    report = RunReport(
        c0=sol.c0,
        c1=sol.c1,
        alpha=sol.alpha,
        iterations=sol.iterations,
        residual=sol.residual,
        kind=str(classification.kind),
        checks=checks,
        notes=notes + check_notes,
    )
    report.files = [
        str(write_lfd_csv(out_dir / LFD_CSV, table)),
        str(write_solution_json(out_dir / SOLUTION_JSON, sol, cfg)),
        str(out_dir / REPORT_JSON),
    ]
    report.exit_code = EXIT_OK if all(checks.values()) else EXIT_VERIFICATION_FAILED
    write_report_json(out_dir / REPORT_JSON, report, details)
    return report


def cmd_solve(spec_path: str | Path, out_dir: str | Path, args: argparse.Namespace) -> RunReport:
    """Solve the bands of a spec file and write lfd.csv, solution.json and report.json."""
    spec = load_band_spec(spec_path)
    return _solve_and_write(spec, Path(out_dir), args)


def cmd_demo(name: str, out_dir: str | Path, args: argparse.Namespace) -> RunReport:
    """Run a named demo; its spec document is written next to the other artifacts."""
    document = demo_spec(name)
    spec = parse_band_spec(document)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec_path = write_json(out_dir / SPEC_JSON, document)
    report = _solve_and_write(spec, out_dir, args, demo_reference_columns(name, spec.grid))
    report.files.append(str(spec_path))
    return report


def cmd_check(solution_path: str | Path, spec_path: str | Path, args: argparse.Namespace) -> RunReport:
    """Verify a stored solution against its spec file."""
    spec = load_band_spec(spec_path)
    sol = read_solution(solution_path, spec.band0, spec.band1)
    cfg = solver_config_from_args(args, read_solver_tol(solution_path))
    checks, _, notes = verify_solution(sol, spec, args, cfg)
    checks["converged"] = sol.converged
    return RunReport(
        c0=sol.c0,
        c1=sol.c1,
        alpha=sol.alpha,
        iterations=sol.iterations,
        residual=fixed_point_residual(sol, spec.band0, spec.band1),
        checks=checks,
        notes=notes,
        exit_code=EXIT_OK if all(checks.values()) else EXIT_VERIFICATION_FAILED,
    )


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    defaults = SolverConfig()
    parser.add_argument("--alpha", type=float, default=defaults.alpha, help="mixing weight of the own iterate")
    parser.add_argument(
        "--tol",
        type=float,
        default=None,
        help=f"sup-norm termination tolerance (default {defaults.tol:g}; check uses the stored value)",
    )
    parser.add_argument("--max-iter", type=int, default=defaults.max_iter, help="iteration cap")
    parser.add_argument("--no-auto-alpha", action="store_true", help="do not retry with alpha=1 on root failure")


def _add_check_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed of the band member sampler")
    parser.add_argument("--samples", type=int, default=DEFAULT_SAMPLES, help="number of sampled band member pairs")
    parser.add_argument("--lambda-grid", default=DEFAULT_LAMBDA_GRID, help="lo:hi:n, log spaced")
    parser.add_argument("--eta-grid", default=None, help="lo:hi:n, linearly spaced; default spans the ratio range")


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with the solve, demo and check subcommands."""
    parser = argparse.ArgumentParser(prog="band-lfd", description="Least favorable densities for density bands.")
    parser.add_argument("--verbose", action="store_true", help="log every iteration")
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="solve the bands of a spec file")
    solve.add_argument("spec", help="JSON band spec")
    solve.add_argument("--out", default="out", help="output directory")

    demo = commands.add_parser("demo", help="run a built-in configuration")
    demo.add_argument("name", help=f"one of: {', '.join(DEMOS)}")
    demo.add_argument("--out", default="out", help="output directory")

    check = commands.add_parser("check", help="verify a stored solution")
    check.add_argument("solution", help="solution.json written by solve or demo")
    check.add_argument("spec", help="JSON band spec the solution was computed from")

    for sub in (solve, demo, check):
        _add_solver_flags(sub)
        _add_check_flags(sub)
    return parser


def main(argv: list[str] | None = None) -> int:
    """Run the command line interface and return its exit code."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (None, 0) else EXIT_INPUT_ERROR
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.samples < 0:
            msg = f"--samples must be nonnegative, got {args.samples}."
            raise InvalidParameterError(msg)
        match args.command:
            case "solve":
                report = cmd_solve(args.spec, args.out, args)
            case "demo":
                report = cmd_demo(args.name, args.out, args)
            case _:
                report = cmd_check(args.solution, args.spec, args)
    except (BandModelError, OSError) as exc:
        logger.error("%s", exc)  # noqa: TRY400
        return EXIT_INPUT_ERROR
    except Exception:
        logger.exception("Unexpected failure")
        return EXIT_INPUT_ERROR

    sys.stdout.write(_check_table(report.checks))
    if report.kind:
        sys.stdout.write(f"kind: {report.kind}\n")
    for note in report.notes:
        sys.stdout.write(f"note: {note}\n")
    if report.exit_code:
        logger.error("Verification failed: %s", ", ".join(name for name, ok in report.checks.items() if not ok))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
