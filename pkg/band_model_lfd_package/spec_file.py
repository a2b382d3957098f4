"""JSON band spec documents: a grid and two density bands.

Example document::

    {
      "grid": {"lo": -10, "hi": 10, "n": 2001},
      "bands": [
        {"kind": "scaled_nominal", "nominal": {"gaussian": {"mean": -1, "sd": 2}},
         "lo_factor": 0.8, "hi_factor": 1.5},
        {"kind": "contamination", "nominal": {"gaussian": {"mean": 1, "sd": 2}},
         "eps": 0.2, "cap_factor": "inf"}
      ]
    }

Band kinds are ``explicit`` (``lower``/``upper`` arrays), ``scaled_nominal``,
``contamination`` and ``envelope`` (``family``: list of nominal specs). The string
``"inf"`` stands for an unbounded upper envelope, as a whole value or per entry.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from numpy.typing import NDArray

from band_model_lfd_package.bands import (
    DensityBand,
    band_from_bounds,
    band_from_contamination,
    band_from_envelope,
    band_from_scaled_nominal,
)
from band_model_lfd_package.errors import BandModelError, SpecParseError
from band_model_lfd_package.grid_measure import Density, Grid, make_uniform_grid
from band_model_lfd_package.nominal_models import create_nominal

logger = logging.getLogger(__name__)

INF_TOKEN = "inf"
BAND_COUNT = 2


@dataclass(frozen=True, eq=False)
class BandSpec:
    """Parsed spec document: the shared grid and the bands of both hypotheses."""

    grid: Grid
    band0: DensityBand
    band1: DensityBand
    document: dict[str, Any]


def _field(obj: Any, key: str, path: str) -> Any:  # noqa: ANN401
    if not isinstance(obj, dict):
        msg = f"{path}: expected an object."
        raise SpecParseError(msg)
    if key not in obj:
        msg = f"{path}.{key}: missing field."
        raise SpecParseError(msg)
    return obj[key]


def _number(value: Any, path: str, *, allow_inf: bool = False) -> float:  # noqa: ANN401
    if allow_inf and value == INF_TOKEN:
        return float("inf")
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        msg = f"{path}: expected a finite number, got {value!r}."
        raise SpecParseError(msg)
    return float(value)


def _array(value: Any, path: str, *, allow_inf: bool = False) -> NDArray[np.float64] | float:  # noqa: ANN401
    if not isinstance(value, list):
        return _number(value, path, allow_inf=allow_inf)
    return np.array([_number(item, f"{path}[{i}]", allow_inf=allow_inf) for i, item in enumerate(value)])


def _grid(spec: Any) -> Grid:  # noqa: ANN401
    lo = _number(_field(spec, "lo", "grid"), "grid.lo")
    hi = _number(_field(spec, "hi", "grid"), "grid.hi")
    n = _field(spec, "n", "grid")
    if isinstance(n, bool) or not isinstance(n, int):
        msg = f"grid.n: expected an integer, got {n!r}."
        raise SpecParseError(msg)
    try:
        return make_uniform_grid(lo, hi, n)
    except BandModelError as exc:
        msg = f"grid: {exc}"
        raise SpecParseError(msg) from exc


def _nominal(spec: Any, grid: Grid, path: str) -> Density:  # noqa: ANN401
    if not isinstance(spec, dict) or len(spec) != 1:
        msg = f"{path}: expected exactly one nominal kind, e.g. {{'gaussian': {{...}}}}."
        raise SpecParseError(msg)
    ((kind, params),) = spec.items()
    if not isinstance(params, dict):
        msg = f"{path}.{kind}: expected an object of parameters."
        raise SpecParseError(msg)
    for key, value in params.items():
        _number(value, f"{path}.{kind}.{key}")
    try:
        return create_nominal(kind, params).density(grid)
    except BandModelError as exc:
        msg = f"{path}.{kind}: {exc}"
        raise SpecParseError(msg) from exc


def _build_band(kind: str, spec: dict[str, Any], grid: Grid, path: str) -> DensityBand:
    match kind:
        case "explicit":
            lower = _array(_field(spec, "lower", path), f"{path}.lower")
            upper = _array(_field(spec, "upper", path), f"{path}.upper", allow_inf=True)
            return band_from_bounds(lower, upper, grid)
        case "scaled_nominal":
            nominal = _nominal(_field(spec, "nominal", path), grid, f"{path}.nominal")
            lo_factor = _number(_field(spec, "lo_factor", path), f"{path}.lo_factor")
            hi_factor = _number(_field(spec, "hi_factor", path), f"{path}.hi_factor", allow_inf=True)
            return band_from_scaled_nominal(nominal, lo_factor, hi_factor)
        case "contamination":
            nominal = _nominal(_field(spec, "nominal", path), grid, f"{path}.nominal")
            eps = _number(_field(spec, "eps", path), f"{path}.eps")
            cap_factor = _number(spec.get("cap_factor", INF_TOKEN), f"{path}.cap_factor", allow_inf=True)
            cap = None if np.isinf(cap_factor) else cap_factor * nominal.values
            return band_from_contamination(nominal, eps, cap)
        case "envelope":
            family = _field(spec, "family", path)
            if not isinstance(family, list):
                msg = f"{path}.family: expected a list of nominal specs."
                raise SpecParseError(msg)
            return band_from_envelope([_nominal(item, grid, f"{path}.family[{i}]") for i, item in enumerate(family)])
        case _:
            msg = f"{path}.kind: unknown band kind {kind!r}."
            raise SpecParseError(msg)


def _band(spec: Any, grid: Grid, path: str) -> DensityBand:  # noqa: ANN401
    kind = _field(spec, "kind", path)
    try:
        return _build_band(kind, spec, grid, path)
    except SpecParseError:
        raise
    except BandModelError as exc:
        msg = f"{path}: {exc}"
        raise SpecParseError(msg) from exc


def parse_band_spec(document: Any) -> BandSpec:  # noqa: ANN401
    """Build the grid and both bands from a decoded spec document.

    Args:
        document: Decoded JSON object

    Returns:
        The parsed spec
    """
    grid = _grid(_field(document, "grid", "spec"))
    bands = _field(document, "bands", "spec")
    if not isinstance(bands, list) or len(bands) != BAND_COUNT:
        msg = "bands: expected a list of exactly two band specs."
        raise SpecParseError(msg)
    band0, band1 = (_band(spec, grid, f"bands[{i}]") for i, spec in enumerate(bands))
    return BandSpec(grid=grid, band0=band0, band1=band1, document=document)


def load_band_spec(path: str | Path) -> BandSpec:
    """Read and parse a spec document from ``path``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        msg = f"Cannot read spec file {path}: {exc}"
        raise SpecParseError(msg) from exc
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        msg = f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}"
        raise SpecParseError(msg) from exc
    logger.debug("Loaded band spec from %s", path)
    return parse_band_spec(document)
