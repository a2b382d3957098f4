"""Sample space discretization, quadrature and density constructors.

All integrals against the dominating measure are weighted sums over a finite grid.
Closed-form densities are renormalized by their quadrature mass so that unit-mass
invariants hold exactly at grid resolution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import norm

from band_model_lfd_package.errors import (
    GridMismatchError,
    InvalidParameterError,
    LengthMismatchError,
)

logger = logging.getLogger(__name__)

MASS_TOL = 1e-8
MIN_GRID_POINTS = 2


def frozen_array(values: ArrayLike) -> NDArray[np.float64]:
    """Return a read-only float copy of ``values``."""
    arr = np.array(values, dtype=np.float64, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Grid:
    """Ordered sample points with positive quadrature weights.

    Attributes:
        points: Strictly increasing sample locations
        weights: Positive quadrature weights approximating the measure
        support_lo: Lower end of the represented interval
        support_hi: Upper end of the represented interval
    """

    points: NDArray[np.float64]
    weights: NDArray[np.float64]
    support_lo: float
    support_hi: float

    def __post_init__(self) -> None:
        """Validate and freeze the arrays."""
        points = frozen_array(self.points)
        weights = frozen_array(self.weights)
        if points.ndim != 1 or weights.ndim != 1:
            msg = "Grid points and weights must be one-dimensional."
            raise InvalidParameterError(msg)
        if points.size != weights.size:
            msg = f"Grid has {points.size} points but {weights.size} weights."
            raise LengthMismatchError(msg)
        if points.size < MIN_GRID_POINTS:
            msg = f"Grid needs at least {MIN_GRID_POINTS} points, got {points.size}."
            raise InvalidParameterError(msg)
        if not np.all(np.isfinite(points)) or np.any(np.diff(points) <= 0):
            msg = "Grid points must be finite and strictly increasing."
            raise InvalidParameterError(msg)
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            msg = "Grid weights must be finite and strictly positive."
            raise InvalidParameterError(msg)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        """Number of grid points."""
        return int(self.points.size)

    @property
    def total_weight(self) -> float:
        """Measure of the whole represented support."""
        return float(self.weights.sum())

    def same_as(self, other: Grid) -> bool:
        """Return True if ``other`` describes the same discretization."""
        if other is self:
            return True
        return (
            other.size == self.size
            and np.array_equal(other.points, self.points)
            and np.array_equal(other.weights, self.weights)
        )

    def require_same(self, other: Grid) -> None:
        """Raise GridMismatchError unless ``other`` matches this grid."""
        if not self.same_as(other):
            msg = "Objects are defined on different grids."
            raise GridMismatchError(msg)

    def check_values(self, values: ArrayLike, name: str = "values") -> NDArray[np.float64]:
        """Convert ``values`` to a float array of this grid's length.

        Args:
            values: Array-like of per-point values
            name: Label used in error messages

        Returns:
            Float array with one entry per grid point
        """
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim == 0:
            arr = np.full(self.size, float(arr))
        if arr.shape != (self.size,):
            msg = f"{name} has shape {arr.shape}, expected ({self.size},)."
            raise LengthMismatchError(msg)
        return arr


@dataclass(frozen=True, eq=False)
class Density:
    """Nonnegative values on a grid; ``mass`` is their quadrature integral."""

    grid: Grid
    values: NDArray[np.float64]
    mass: float = field(init=False)

    def __post_init__(self) -> None:
        """Validate the values and cache the mass."""
        values = frozen_array(self.grid.check_values(self.values, "density values"))
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            msg = "Density values must be finite and nonnegative."
            raise InvalidParameterError(msg)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mass", integrate(values, self.grid))

    def is_probability(self, mass_tol: float = MASS_TOL) -> bool:
        """Return True if the density integrates to one within ``mass_tol``."""
        return abs(self.mass - 1.0) <= mass_tol

    def normalized(self) -> Density:
        """Return this density divided by its quadrature mass."""
        if self.mass <= 0:
            msg = "Cannot normalize a density with zero mass."
            raise InvalidParameterError(msg)
        return Density(self.grid, self.values / self.mass)


def make_grid(points: ArrayLike, weights: ArrayLike) -> Grid:
    """Build a grid from explicit points and weights."""
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 1 or pts.size == 0:
        msg = "Grid points must be a nonempty one-dimensional array."
        raise InvalidParameterError(msg)
    return Grid(pts, np.asarray(weights, dtype=np.float64), float(pts[0]), float(pts[-1]))


def make_counting_grid(points: ArrayLike) -> Grid:
    """Build a grid for a discrete sample space under the counting measure."""
    pts = np.asarray(points, dtype=np.float64)
    return make_grid(pts, np.ones_like(pts))


def make_uniform_grid(lo: float, hi: float, n: int) -> Grid:
    """Build ``n`` equispaced points on ``[lo, hi]`` with trapezoid weights.

    Interior points own a full cell of width ``h``; the two endpoints own the half
    cell that lies inside the interval, so the weights sum to ``hi - lo``.

    Args:
        lo: Left end of the support
        hi: Right end of the support
        n: Number of points, at least two

    Returns:
        The uniform grid
    """
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        msg = f"Invalid grid range [{lo}, {hi}]."
        raise InvalidParameterError(msg)
    if n < MIN_GRID_POINTS:
        msg = f"Grid needs at least {MIN_GRID_POINTS} points, got {n}."
        raise InvalidParameterError(msg)
    points = np.linspace(lo, hi, n)
    h = (hi - lo) / (n - 1)
    weights = np.full(n, h)
    weights[0] = weights[-1] = h / 2.0
    return Grid(points, weights, float(lo), float(hi))


def integrate(f: ArrayLike, grid: Grid) -> float:
    """Return the quadrature integral of per-point values ``f``."""
    values = grid.check_values(f, "integrand")
    if not np.all(np.isfinite(values)):
        msg = "Integrand must be finite on every grid point."
        raise InvalidParameterError(msg)
    return float(np.dot(grid.weights, values))


def _renormalized(grid: Grid, values: NDArray[np.float64], label: str) -> Density:
    raw = Density(grid, values)
    if raw.mass <= 0:
        msg = f"{label} has no mass on the grid [{grid.support_lo}, {grid.support_hi}]."
        raise InvalidParameterError(msg)
    logger.debug("%s truncation mass %.3e before renormalization.", label, 1.0 - raw.mass)
    return raw.normalized()


def gaussian_density(grid: Grid, mean: float, sd: float) -> Density:
    """Gaussian density with the given mean and standard deviation, renormalized."""
    if not sd > 0:
        msg = f"Standard deviation must be positive, got {sd}."
        raise InvalidParameterError(msg)
    return _renormalized(grid, norm.pdf(grid.points, loc=mean, scale=sd), "gaussian")


def _require_nonnegative_support(grid: Grid) -> None:
    if grid.points[0] < 0:
        msg = f"Energy densities need a nonnegative support, grid starts at {grid.points[0]}."
        raise InvalidParameterError(msg)


def exp_energy_density_h0(grid: Grid, sigw2: float) -> Density:
    """Density of the received energy when only noise of power ``sigw2`` is present."""
    _require_nonnegative_support(grid)
    if not sigw2 > 0:
        msg = f"Noise power must be positive, got {sigw2}."
        raise InvalidParameterError(msg)
    values = np.exp(-grid.points / sigw2) / sigw2
    return _renormalized(grid, values, "energy h0")


def exp_energy_density_h1(grid: Grid, sigw2: float, sigs2: float) -> Density:
    """Density of the received energy for signal power ``sigs2`` in noise ``sigw2``.

    Evaluated as ``exp(-x/sigw2) * expm1(x (1/sigw2 - 1/sigs2))`` so the difference of
    exponentials stays nonnegative and accurate near the origin.
    """
    _require_nonnegative_support(grid)
    if not sigw2 > 0 or not sigs2 > sigw2:
        msg = f"Need sigs2 > sigw2 > 0, got sigw2={sigw2}, sigs2={sigs2}."
        raise InvalidParameterError(msg)
    x = grid.points
    values = np.exp(-x / sigw2) * np.expm1(x * (1.0 / sigw2 - 1.0 / sigs2)) / (sigs2 - sigw2)
    return _renormalized(grid, values, "energy h1")
