"""Robust likelihood ratio test derived from a least favorable pair.

Builds the single-sample ratio table, finds the plateaus the band constraints carve
into it and evaluates the resulting threshold rule against arbitrary densities.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import NDArray

from band_model_lfd_package.data_models import (
    FigureData,
    Plateau,
    RatioTable,
    RegionClassification,
    RegionKind,
)
from band_model_lfd_package.errors import InvalidParameterError
from band_model_lfd_package.grid_measure import integrate
from band_model_lfd_package.solver import likelihood_ratio

if TYPE_CHECKING:
    from band_model_lfd_package.data_models import LfdSolution
    from band_model_lfd_package.grid_measure import Density

logger = logging.getLogger(__name__)

FIGURE_COLUMNS = ("omega", "p0_lower", "p0_upper", "p1_lower", "p1_upper", "q0", "q1", "log_ratio")
MIN_DEFINED_POINTS = 2


@dataclass(frozen=True)
class ClassifierConfig:
    """Parameters of the plateau detector.

    Attributes:
        plateau_tol: Relative spread allowed within a plateau
        min_plateau_points: Minimum number of grid points of a plateau
        censor_window: Ratio levels an interior plateau must fall in to count as censoring
        trim_mass: Mixture mass cut from the two tails before classification
    """

    plateau_tol: float = 1e-3
    min_plateau_points: int = 5
    censor_window: tuple[float, float] = (0.5, 2.0)
    trim_mass: float = 0.05

    def __post_init__(self) -> None:
        """Validate the parameters."""
        if not self.plateau_tol > 0 or self.min_plateau_points < MIN_DEFINED_POINTS:
            msg = "plateau_tol must be positive and min_plateau_points at least two."
            raise InvalidParameterError(msg)
        lo, hi = self.censor_window
        if not 0 < lo <= 1 <= hi:
            msg = f"censor_window must bracket one, got {self.censor_window}."
            raise InvalidParameterError(msg)
        if not 0 <= self.trim_mass < 1:
            msg = f"trim_mass must lie in [0, 1), got {self.trim_mass}."
            raise InvalidParameterError(msg)


def ratio_table(q0: Density, q1: Density) -> RatioTable:
    """Tabulate ``q1 / q0`` and its logarithm on the shared grid."""
    q0.grid.require_same(q1.grid)
    ratio, undefined = likelihood_ratio(q0.values, q1.values)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = np.log(ratio)
    return RatioTable(
        grid=q0.grid,
        ratio=ratio,
        log_ratio=log_ratio,
        undefined=undefined,
        mixture=0.5 * (q0.values + q1.values),
    )


def build_ratio(sol: LfdSolution) -> RatioTable:
    """Tabulate the likelihood ratio of a solution."""
    return ratio_table(sol.q0, sol.q1)


def _effective_support(rt: RatioTable, trim_mass: float) -> tuple[int, int]:
    cumulative = np.cumsum(rt.grid.weights * rt.mixture)
    total = cumulative[-1]
    if total <= 0:
        return 0, rt.grid.size - 1
    cdf = cumulative / total
    last = rt.grid.size - 1
    lo = min(int(np.searchsorted(cdf, 0.5 * trim_mass, side="left")), last)
    hi = min(int(np.searchsorted(cdf, 1.0 - 0.5 * trim_mass, side="left")), last)
    return lo, max(hi, lo)


def _find_plateaus(
    values: NDArray[np.float64],
    usable: NDArray[np.bool_],
    config: ClassifierConfig,
) -> list[tuple[int, int]]:
    runs = []
    i, n = 0, values.size
    while i < n:
        if not usable[i]:
            i += 1
            continue
        lo = hi = values[i]
        j = i + 1
        while j < n and usable[j]:
            new_lo, new_hi = min(lo, values[j]), max(hi, values[j])
            if new_hi - new_lo > config.plateau_tol * new_lo:
                break
            lo, hi = new_lo, new_hi
            j += 1
        if j - i >= config.min_plateau_points:
            runs.append((i, j))
            i = j
        else:
            i += 1
    return runs


def classify_regions(rt: RatioTable, config: ClassifierConfig | None = None) -> RegionClassification:
    """Detect ratio plateaus and name the resulting test shape.

    Plateaus are searched on the central interval carrying ``1 - trim_mass`` of the
    mixture ``(q0 + q1) / 2``. A plateau is extremal if its level matches the smallest
    or largest ratio there. Only extremal plateaus on both ends give a clipped test,
    a single interior plateau inside ``censor_window`` a censored one and any other
    interior plateau a compressed one.

    Args:
        rt: Ratio table to classify
        config: Detector parameters

    Returns:
        The plateaus found and the shape label
    """
    config = config or ClassifierConfig()
    defined = np.isfinite(rt.ratio) & ~rt.undefined
    if np.count_nonzero(defined) < MIN_DEFINED_POINTS:
        msg = "Ratio must be defined on at least two grid points."
        raise InvalidParameterError(msg)

    start, stop = _effective_support(rt, config.trim_mass)
    window = slice(start, stop + 1)
    values = np.where(defined, rt.ratio, 0.0)[window]
    usable = defined[window]
    points = rt.grid.points
    support = (float(points[start]), float(points[stop]))

    plateaus = tuple(
        Plateau(
            interval=(float(points[start + a]), float(points[start + b - 1])),
            level=float(np.mean(values[a:b])),
            start=start + a,
            stop=start + b,
        )
        for a, b in _find_plateaus(values, usable, config)
    )
    if not plateaus:
        kind = RegionKind.NOMINAL
    else:
        low, high = float(values[usable].min()), float(values[usable].max())
        tol = config.plateau_tol

        def at_low(p: Plateau) -> bool:
            return p.level <= low * (1.0 + tol)

        def at_high(p: Plateau) -> bool:
            return p.level >= high * (1.0 - tol)

        interior = [p for p in plateaus if not (at_low(p) or at_high(p))]
        censor_lo, censor_hi = config.censor_window
        if not interior:
            both_ends = any(map(at_low, plateaus)) and any(map(at_high, plateaus))
            kind = RegionKind.CLIPPED if both_ends else RegionKind.OTHER
        elif len(interior) == 1 and censor_lo <= interior[0].level <= censor_hi:
            kind = RegionKind.CENSORED
        else:
            kind = RegionKind.COMPRESSED

    logger.debug("Found %d plateaus on [%g, %g]: %s", len(plateaus), support[0], support[1], kind)
    return RegionClassification(plateaus=plateaus, kind=kind, support=support)


def weighted_error(p0: Density, p1: Density, rt: RatioTable, lam: float) -> float:
    """Weighted error of the rule ``1{ratio > 1/lam}`` when the data follow ``(p0, p1)``.

    Ties go to the null decision.

    Args:
        p0: Density of the data under the null hypothesis
        p1: Density of the data under the alternative
        rt: Ratio table defining the rule
        lam: Positive weight of the second error

    Returns:
        ``P0[decide 1] + lam * P1[decide 0]``
    """
    if not lam > 0:
        msg = f"lambda must be positive, got {lam}."
        raise InvalidParameterError(msg)
    rt.grid.require_same(p0.grid)
    rt.grid.require_same(p1.grid)
    decide_one = rt.ratio > 1.0 / lam
    false_alarm = integrate(np.where(decide_one, p0.values, 0.0), rt.grid)
    miss = integrate(np.where(decide_one, 0.0, p1.values), rt.grid)
    return false_alarm + lam * miss


def export_figure_data(
    sol: LfdSolution,
    rt: RatioTable,
    extra: dict[str, NDArray[np.float64]] | None = None,
) -> FigureData:
    """Collect bands, solution and log ratio column by column for plotting.

    Args:
        sol: Solved pair, carrying its bands
        rt: Ratio table of the pair
        extra: Additional reference columns appended after the fixed ones

    Returns:
        The figure table
    """
    rt.grid.require_same(sol.q0.grid)
    data = {
        "omega": rt.grid.points,
        "p0_lower": sol.band0.lower,
        "p0_upper": sol.band0.upper,
        "p1_lower": sol.band1.lower,
        "p1_upper": sol.band1.upper,
        "q0": sol.q0.values,
        "q1": sol.q1.values,
        "log_ratio": rt.log_ratio,
    }
    columns = list(FIGURE_COLUMNS)
    for name, values in (extra or {}).items():
        data[name] = rt.grid.check_values(values, name)
        columns.append(name)
    return FigureData(columns=tuple(columns), data=data)


def _relative_distance(ratio: NDArray[np.float64], level: NDArray[np.float64]) -> NDArray[np.float64]:
    with np.errstate(divide="ignore", invalid="ignore"):
        dist = np.abs(ratio - level) / level
    dist = np.where(ratio == level, 0.0, dist)
    return np.where(np.isnan(dist), np.inf, dist)


def ratio_level_defect(rt: RatioTable, sol: LfdSolution) -> float:
    """Largest relative distance of a defined ratio value from the admissible levels.

    A least favorable pair only takes the ratios of the four envelope combinations
    and the two clip levels ``(1 - alpha c0) / c0`` and ``c1 / (1 - alpha c1)``.
    """
    rt.grid.require_same(sol.q0.grid)
    band0, band1 = sol.band0, sol.band1
    envelope_levels = [
        likelihood_ratio(den, num)[0]
        for den in (band0.lower, band0.upper)
        for num in (band1.lower, band1.upper)
    ]
    alpha = sol.alpha
    lower_clip = (1.0 - alpha * sol.c0) / sol.c0
    upper_clip = sol.c1 / (1.0 - alpha * sol.c1) if alpha * sol.c1 < 1.0 else np.inf
    size = rt.grid.size
    levels = [*envelope_levels, np.full(size, lower_clip), np.full(size, upper_clip)]

    defined = ~rt.undefined
    if not np.any(defined):
        return 0.0
    distances = np.vstack([_relative_distance(rt.ratio, level) for level in levels]).min(axis=0)
    return float(np.max(distances[defined]))
