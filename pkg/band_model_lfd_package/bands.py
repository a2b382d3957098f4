"""Density band uncertainty sets: construction, validation and sampling.

A band is a pair of pointwise envelopes ``lower <= p <= upper`` whose masses bracket
one. Upper envelopes may be ``+inf`` pointwise, which is how the contamination model
with unrestricted outliers is represented.
"""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray

from band_model_lfd_package.data_models import FeasibleSample
from band_model_lfd_package.errors import (
    InvalidParameterError,
    LowerMassExceedsOneError,
    NoRootError,
    OrderingViolationError,
    ProjectionInfeasibleError,
    UpperMassBelowOneError,
)
from band_model_lfd_package.grid_measure import (
    MASS_TOL,
    Density,
    Grid,
    frozen_array,
    integrate,
)

logger = logging.getLogger(__name__)

BAND_TOL = 1e-12
M_CAP_FACTOR = 10.0
EXTREME_FLOOR = 1e-6
MIN_THRESHOLD_POINTS = 3


@dataclass(frozen=True, eq=False)
class DensityBand:
    """Pointwise envelopes of one composite hypothesis.

    Attributes:
        grid: Grid the envelopes live on
        lower: Nonnegative lower envelope
        upper: Upper envelope, finite or ``+inf`` per point
        lower_mass: Quadrature mass of the lower envelope
        upper_mass: Quadrature mass of the upper envelope (``+inf`` allowed)
    """

    grid: Grid
    lower: NDArray[np.float64]
    upper: NDArray[np.float64]
    lower_mass: float = field(init=False)
    upper_mass: float = field(init=False)

    def __post_init__(self) -> None:
        """Validate ordering and mass conditions."""
        lower = frozen_array(self.grid.check_values(self.lower, "lower envelope"))
        upper = frozen_array(self.grid.check_values(self.upper, "upper envelope"))
        if not np.all(np.isfinite(lower)) or np.any(lower < 0):
            msg = "Lower envelope must be finite and nonnegative."
            raise OrderingViolationError(msg)
        if np.any(np.isnan(upper)) or np.any(lower > upper):
            bad = int(np.count_nonzero(~(lower <= upper)))
            msg = f"Lower envelope exceeds upper envelope on {bad} grid points."
            raise OrderingViolationError(msg)

        lower_mass = integrate(lower, self.grid)
        upper_mass = float("inf") if np.any(np.isinf(upper)) else integrate(upper, self.grid)
        if lower_mass > 1.0 + MASS_TOL:
            msg = f"Lower envelope mass {lower_mass:.10g} exceeds one."
            raise LowerMassExceedsOneError(msg)
        if upper_mass < 1.0 - MASS_TOL:
            msg = f"Upper envelope mass {upper_mass:.10g} is below one."
            raise UpperMassBelowOneError(msg)

        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "lower_mass", lower_mass)
        object.__setattr__(self, "upper_mass", upper_mass)

    @property
    def has_infinite_upper(self) -> bool:
        """True if the upper envelope is unbounded somewhere."""
        return bool(np.any(np.isinf(self.upper)))

    def is_singleton(self) -> bool:
        """True if the band admits exactly one member."""
        return bool(np.array_equal(self.lower, self.upper))


def band_from_bounds(lower: ArrayLike, upper: ArrayLike, grid: Grid) -> DensityBand:
    """Build a validated band from explicit envelopes.

    Args:
        lower: Lower envelope values (or a scalar)
        upper: Upper envelope values, ``inf`` allowed (or a scalar)
        grid: Grid the values refer to

    Returns:
        The validated band
    """
    return DensityBand(grid, grid.check_values(lower, "lower"), grid.check_values(upper, "upper"))


def _require_unit_mass(nominal: Density) -> None:
    if not nominal.is_probability():
        msg = f"Nominal density has mass {nominal.mass:.10g}, expected one."
        raise InvalidParameterError(msg)


def band_from_contamination(
    nominal: Density,
    eps: float,
    cap: ArrayLike | None = None,
) -> DensityBand:
    """Build the band ``(1 - eps) * nominal <= p <= cap``.

    Args:
        nominal: Unit-mass nominal density
        eps: Contamination rate in [0, 1]
        cap: Upper envelope values; ``None`` means unbounded

    Returns:
        The validated band
    """
    _require_unit_mass(nominal)
    if not 0.0 <= eps <= 1.0:
        msg = f"Contamination rate must lie in [0, 1], got {eps}."
        raise InvalidParameterError(msg)
    lower = (1.0 - eps) * nominal.values
    upper = np.full(nominal.grid.size, np.inf) if cap is None else nominal.grid.check_values(cap, "cap")
    if np.any(upper < lower):
        msg = "Contamination cap lies below the scaled nominal."
        raise OrderingViolationError(msg)
    return DensityBand(nominal.grid, lower, upper)


def band_from_scaled_nominal(nominal: Density, lo_factor: float, hi_factor: float) -> DensityBand:
    """Build the band ``lo_factor * nominal <= p <= hi_factor * nominal``."""
    _require_unit_mass(nominal)
    if not 0.0 <= lo_factor <= 1.0 <= hi_factor:
        msg = f"Need 0 <= lo_factor <= 1 <= hi_factor, got {lo_factor}, {hi_factor}."
        raise InvalidParameterError(msg)
    upper = np.full(nominal.grid.size, np.inf) if np.isinf(hi_factor) else hi_factor * nominal.values
    return DensityBand(nominal.grid, lo_factor * nominal.values, upper)


def band_from_envelope(family: Sequence[Density]) -> DensityBand:
    """Build the band spanned by the pointwise minimum and maximum of ``family``."""
    if not family:
        msg = "Envelope family is empty."
        raise InvalidParameterError(msg)
    grid = family[0].grid
    for member in family[1:]:
        grid.require_same(member.grid)
    stacked = np.vstack([member.values for member in family])
    return DensityBand(grid, stacked.min(axis=0), stacked.max(axis=0))


def contamination_rate(band: DensityBand) -> float:
    """Return ``1 - lower_mass`` clamped to [0, 1]."""
    return float(np.clip(1.0 - band.lower_mass, 0.0, 1.0))


def contains(
    band: DensityBand,
    density: Density,
    band_tol: float = 0.0,
    mass_tol: float = MASS_TOL,
) -> bool:
    """Return True if ``density`` is a member of ``band``.

    Args:
        band: The uncertainty set
        density: Candidate member
        band_tol: Pointwise slack on both envelopes
        mass_tol: Slack on the unit-mass condition

    Returns:
        Whether the candidate lies in the band and has unit mass
    """
    band.grid.require_same(density.grid)
    values = density.values
    inside = np.all(values >= band.lower - band_tol) and np.all(values <= band.upper + band_tol)
    return bool(inside) and abs(density.mass - 1.0) <= mass_tol


def _project(reference: NDArray[np.float64], band: DensityBand) -> FeasibleSample:
    from band_model_lfd_package.solver import clip_project

    try:
        density, c = clip_project(reference, band)
    except NoRootError as exc:
        msg = f"Reference cannot be normalized inside the band: {exc}"
        raise ProjectionInfeasibleError(msg) from exc
    return FeasibleSample(density=density, projection_constant=c)


def sample_feasible(band: DensityBand, rng_seed: int, m_cap: float | None = None) -> FeasibleSample:
    """Draw a random band member.

    A reference is drawn pointwise uniformly between the lower envelope and
    ``min(upper, m_cap)`` and then clip-projected onto the band.

    Args:
        band: The uncertainty set
        rng_seed: Seed of the random generator
        m_cap: Ceiling used where the upper envelope is large or infinite.
            Defaults to ten times the largest lower envelope value.

    Returns:
        The projected member and its clip constant
    """
    if m_cap is None:
        m_cap = M_CAP_FACTOR * max(float(band.lower.max()), 1.0 / band.grid.total_weight)
    rng = np.random.default_rng(rng_seed)
    ceiling = np.minimum(band.upper, np.maximum(m_cap, band.lower))
    reference = band.lower + rng.uniform(0.0, 1.0, band.grid.size) * (ceiling - band.lower)
    return _project(reference, band)


def sample_extreme(band: DensityBand, rng_seed: int) -> FeasibleSample:
    """Draw a threshold-shaped member that pushes free mass onto a random half-line.

    The reference is one on ``{omega > t}`` (or ``{omega < t}``) and nearly zero
    elsewhere, so the projection sits at the lower envelope off the half-line and
    fills the half-line towards the upper envelope. Two-point grids have no interior
    threshold and push the free mass onto one random point.

    Args:
        band: The uncertainty set
        rng_seed: Seed of the random generator

    Returns:
        The projected member and its clip constant
    """
    rng = np.random.default_rng(rng_seed)
    points = band.grid.points
    if band.grid.size >= MIN_THRESHOLD_POINTS:
        threshold = points[rng.integers(1, band.grid.size - 1)]
        mask = points > threshold if rng.integers(0, 2) else points < threshold
    else:
        mask = points == points[rng.integers(0, band.grid.size)]
    reference = np.where(mask, 1.0, EXTREME_FLOOR)
    return _project(reference, band)


def sample_feasible_pairs(
    band0: DensityBand,
    band1: DensityBand,
    n_samples: int,
    seed: int,
) -> list[tuple[Density, Density]]:
    """Draw ``n_samples`` member pairs, alternating uniform and threshold-shaped draws.

    Args:
        band0: Band of the null hypothesis
        band1: Band of the alternative
        n_samples: Number of pairs
        seed: Master seed; per-draw seeds are derived from it

    Returns:
        List of (P0, P1) densities
    """
    band0.grid.require_same(band1.grid)
    seeds = np.random.default_rng(seed).integers(0, 2**32, size=(max(n_samples, 0), 2))
    pairs = []
    for i, (seed0, seed1) in enumerate(seeds):
        draw = sample_feasible if i % 2 == 0 else sample_extreme
        pairs.append((draw(band0, int(seed0)).density, draw(band1, int(seed1)).density))
    logger.debug("Drew %d feasible pairs with seed %d.", len(pairs), seed)
    return pairs
