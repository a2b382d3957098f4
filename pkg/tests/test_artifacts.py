"""Tests for the CSV and JSON run artifacts."""

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from band_model_lfd_package.artifacts import (
    read_solution,
    solution_document,
    write_lfd_csv,
    write_report_json,
    write_solution_json,
)
from band_model_lfd_package.data_models import RunReport
from band_model_lfd_package.errors import SpecParseError
from band_model_lfd_package.solver import fixed_point_residual
from band_model_lfd_package.statistic import FIGURE_COLUMNS, build_ratio, export_figure_data
from tests.conftest import TIGHT_CONFIG, DemoRun


def test_lfd_csv_layout(huber_run: DemoRun, tmp_path: Path) -> None:
    """The CSV has a header and one row per grid point; unbounded uppers read back as inf."""
    solution = huber_run.solution
    table = export_figure_data(solution, build_ratio(solution))
    path = write_lfd_csv(tmp_path / "lfd.csv", table)
    with path.open(encoding="utf-8", newline="") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == FIGURE_COLUMNS  # noqa: S101
    assert len(rows) == solution.q0.grid.size + 1  # noqa: S101
    upper = np.array([float(row[FIGURE_COLUMNS.index("p0_upper")]) for row in rows[1:]])
    assert np.all(np.isinf(upper))  # noqa: S101
    q0 = np.array([float(row[FIGURE_COLUMNS.index("q0")]) for row in rows[1:]])
    assert np.array_equal(q0, solution.q0.values)  # noqa: S101


def test_solution_document_contents(censoring_run: DemoRun) -> None:
    """The solution document carries constants, diagnostics and the solver settings."""
    document = solution_document(censoring_run.solution, TIGHT_CONFIG)
    assert document["c0"] == censoring_run.solution.c0  # noqa: S101
    assert document["solver"]["tol"] == TIGHT_CONFIG.tol  # noqa: S101
    assert document["grid"]["n"] == censoring_run.spec.grid.size  # noqa: S101
    assert len(document["tv_history"]) == censoring_run.solution.iterations + 1  # noqa: S101


def test_solution_read_back(censoring_run: DemoRun, tmp_path: Path) -> None:
    """A written solution reads back with identical densities and constants."""
    spec = censoring_run.spec
    path = write_solution_json(tmp_path / "solution.json", censoring_run.solution, TIGHT_CONFIG)
    loaded = read_solution(path, spec.band0, spec.band1)
    assert loaded.c0 == censoring_run.solution.c0  # noqa: S101
    assert loaded.tv_history == censoring_run.solution.tv_history  # noqa: S101
    assert np.array_equal(loaded.q1.values, censoring_run.solution.q1.values)  # noqa: S101
    residual = fixed_point_residual(loaded, spec.band0, spec.band1)
    assert residual == fixed_point_residual(censoring_run.solution, spec.band0, spec.band1)  # noqa: S101


@pytest.mark.parametrize(
    ("content", "match"),
    [
        ("{", "line 1"),
        ('{"c0": 1.0}', "missing field"),
        ('{"c0": 1, "c1": 1, "alpha": 0, "residual": 0, "iterations": 1, "q0": [1.0], "q1": [1.0]}', "expected"),
    ],
)
def test_read_solution_errors(censoring_run: DemoRun, tmp_path: Path, content: str, match: str) -> None:
    """Broken solution files raise parse errors naming the problem."""
    path = tmp_path / "solution.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(SpecParseError, match=match):
        read_solution(path, censoring_run.spec.band0, censoring_run.spec.band1)


def test_report_json_layout(tmp_path: Path) -> None:
    """Reports hold a summary and a details section."""
    report = RunReport(c0=0.5, c1=0.25, alpha=0.0, iterations=3, residual=0.0, checks={"feasible": True})
    path = write_report_json(tmp_path / "report.json", report, {"fixed_point_residual": 0.0})
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["summary"]["checks"] == {"feasible": True}  # noqa: S101
    assert document["details"] == {"fixed_point_residual": 0.0}  # noqa: S101
