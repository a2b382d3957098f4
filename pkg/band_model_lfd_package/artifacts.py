"""Run artifacts: figure CSV, solution and report JSON, and the solution reader."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

from band_model_lfd_package.data_models import LfdSolution
from band_model_lfd_package.errors import BandModelError, SpecParseError
from band_model_lfd_package.grid_measure import Density

if TYPE_CHECKING:
    from band_model_lfd_package.bands import DensityBand
    from band_model_lfd_package.data_models import FigureData, RunReport
    from band_model_lfd_package.solver import SolverConfig

logger = logging.getLogger(__name__)

LFD_CSV = "lfd.csv"
SOLUTION_JSON = "solution.json"
REPORT_JSON = "report.json"
SPEC_JSON = "spec.json"

_SOLUTION_FLOATS = ("c0", "c1", "alpha", "residual")


def _cell(value: float) -> str:
    # repr keeps full precision and spells infinities and NaN as inf / nan
    return repr(float(value))


def write_lfd_csv(path: str | Path, table: FigureData) -> Path:
    """Write a figure table as CSV with a header row.

    Args:
        path: Target file
        table: Column-oriented figure data

    Returns:
        The written path
    """
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(table.columns)
        writer.writerows([_cell(value) for value in row] for row in table.rows())
    logger.info("Wrote %d rows to %s", len(table.data[table.columns[0]]), path)
    return path


def solution_document(sol: LfdSolution, cfg: SolverConfig) -> dict[str, Any]:
    """Return the JSON form of a solution with its solver settings."""
    grid = sol.q0.grid
    return {
        "c0": sol.c0,
        "c1": sol.c1,
        "alpha": sol.alpha,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "converged": sol.converged,
        "alpha_escalated": sol.alpha_escalated,
        "tv_history": list(sol.tv_history),
        "tv_half_history": list(sol.tv_half_history),
        "solver": asdict(cfg),
        "grid": {"lo": grid.support_lo, "hi": grid.support_hi, "n": grid.size},
        "q0": sol.q0.values.tolist(),
        "q1": sol.q1.values.tolist(),
    }


def write_json(path: str | Path, document: dict[str, Any]) -> Path:
    """Write ``document`` as indented JSON."""
    path = Path(path)
    path.write_text(json.dumps(document, indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
    return path


def write_solution_json(path: str | Path, sol: LfdSolution, cfg: SolverConfig) -> Path:
    """Write the constants, diagnostics and densities of a solution."""
    return write_json(path, solution_document(sol, cfg))


def write_report_json(path: str | Path, report: RunReport, details: dict[str, Any]) -> Path:
    """Write a run summary together with the detailed verification records."""
    return write_json(path, {"summary": asdict(report), "details": details})


def _load_solution_document(path: Path) -> dict[str, Any]:
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        msg = f"Cannot read solution file {path}: {exc}"
        raise SpecParseError(msg) from exc
    except json.JSONDecodeError as exc:
        msg = f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        raise SpecParseError(msg) from exc
    if not isinstance(document, dict):
        msg = f"{path}: expected a JSON object."
        raise SpecParseError(msg)
    return document


def read_solver_tol(path: str | Path) -> float | None:
    """Return the termination tolerance stored with a solution, None if none was written."""
    path = Path(path)
    settings = _load_solution_document(path).get("solver") or {}
    if not isinstance(settings, dict):
        msg = f"{path}: solver settings must be an object."
        raise SpecParseError(msg)
    tol = settings.get("tol")
    if tol is None:
        return None
    try:
        value = float(tol)
    except (TypeError, ValueError) as exc:
        msg = f"{path}: invalid solver tol {tol!r}."
        raise SpecParseError(msg) from exc
    return value


def read_solution(path: str | Path, band0: DensityBand, band1: DensityBand) -> LfdSolution:
    """Rebuild a solution written by ``write_solution_json`` on the bands' grid.

    Args:
        path: Solution file
        band0: Band of the null hypothesis
        band1: Band of the alternative

    Returns:
        The stored solution
    """
    path = Path(path)
    document = _load_solution_document(path)

    try:
        floats = {key: float(document[key]) for key in _SOLUTION_FLOATS}
        q0 = Density(band0.grid, np.asarray(document["q0"], dtype=np.float64))
        q1 = Density(band1.grid, np.asarray(document["q1"], dtype=np.float64))
        return LfdSolution(
            q0=q0,
            q1=q1,
            iterations=int(document["iterations"]),
            tv_history=tuple(float(v) for v in document.get("tv_history", ())),
            tv_half_history=tuple(float(v) for v in document.get("tv_half_history", ())),
            band0=band0,
            band1=band1,
            converged=bool(document.get("converged", True)),
            alpha_escalated=bool(document.get("alpha_escalated", False)),
            **floats,
        )
    except KeyError as exc:
        msg = f"{path}: missing field {exc}."
        raise SpecParseError(msg) from exc
    except (TypeError, ValueError, BandModelError) as exc:
        msg = f"{path}: {exc}"
        raise SpecParseError(msg) from exc
