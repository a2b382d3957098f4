"""Data models for solver results, verification reports and CLI runs."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    import numpy as np
    from numpy.typing import NDArray

    from band_model_lfd_package.bands import DensityBand
    from band_model_lfd_package.grid_measure import Density, Grid


@dataclass(frozen=True, eq=False)
class FeasibleSample:
    """A band member and the clip constant that produced it."""

    density: Density
    projection_constant: float


@dataclass(frozen=True, eq=False)
class LfdSolution:
    """Least favorable pair with its clip constants and iteration diagnostics.

    Attributes:
        q0: Least favorable density under the null hypothesis
        q1: Least favorable density under the alternative
        c0: Clip constant of the q0 update
        c1: Clip constant of the q1 update
        alpha: Mixing weight the iteration ran with
        iterations: Number of completed fixed-point steps
        residual: Sup-norm defect of the fixed-point equations
        tv_history: Total variation between q0 and q1, starting with the initial pair
        tv_half_history: Total variation after each q0 update
        band0: Band of the null hypothesis
        band1: Band of the alternative
        converged: Whether the termination tolerance was met
        alpha_escalated: Whether alpha was raised after a failed root search
    """

    q0: Density
    q1: Density
    c0: float
    c1: float
    alpha: float
    iterations: int
    residual: float
    tv_history: tuple[float, ...]
    band0: DensityBand
    band1: DensityBand
    tv_half_history: tuple[float, ...] = ()
    converged: bool = True
    alpha_escalated: bool = False


@dataclass(frozen=True)
class BoundRecord:
    """Value of the weighted minimum error at one lambda against its dual bound."""

    lam: float
    l_value: float
    best_bound: float
    gap: float
    corner: tuple[int, int]


@dataclass(frozen=True)
class OptimalityReport:
    """Sampled-pair maximization check of the weighted minimum error."""

    lambda_grid: tuple[float, ...]
    l_at_solution: tuple[float, ...]
    max_l_over_samples: tuple[float, ...]
    bound_min: tuple[float, ...]
    dominance_pass: bool
    margin: float
    n_samples: int


@dataclass(frozen=True)
class DominanceReport:
    """Worst violations of the two stochastic dominance inequalities."""

    eta_grid: tuple[float, ...]
    worst_violation_h0: float
    worst_violation_h1: float
    passed: bool
    n_samples: int


@dataclass(frozen=True, eq=False)
class RatioTable:
    """Pointwise likelihood ratio q1/q0 on a grid.

    ``undefined`` flags points where both densities vanish; ``ratio`` and
    ``log_ratio`` hold NaN there. ``mixture`` is (q0 + q1) / 2, used to locate the
    effective support.
    """

    grid: Grid
    ratio: NDArray[np.float64]
    log_ratio: NDArray[np.float64]
    undefined: NDArray[np.bool_]
    mixture: NDArray[np.float64]


class RegionKind(StrEnum):
    """Shape of a robust test statistic."""

    NOMINAL = "nominal"
    CLIPPED = "clipped"
    CENSORED = "censored"
    COMPRESSED = "compressed"
    OTHER = "other"


@dataclass(frozen=True)
class Plateau:
    """Maximal run of near-constant likelihood ratio."""

    interval: tuple[float, float]
    level: float
    start: int
    stop: int

    @property
    def n_points(self) -> int:
        """Number of grid points covered."""
        return self.stop - self.start


@dataclass(frozen=True)
class RegionClassification:
    """Plateaus of a ratio table and the resulting test shape."""

    plateaus: tuple[Plateau, ...]
    kind: RegionKind
    support: tuple[float, float]


@dataclass(frozen=True, eq=False)
class FigureData:
    """Column-oriented table of plot data."""

    columns: tuple[str, ...]
    data: dict[str, NDArray[np.float64]]

    def rows(self) -> list[tuple[float, ...]]:
        """Return the table row by row."""
        return list(zip(*(self.data[name] for name in self.columns), strict=True))


@dataclass
class RunReport:
    """Summary of one CLI run."""

    c0: float
    c1: float
    alpha: float
    iterations: int
    residual: float
    kind: str | None = None
    checks: dict[str, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    files: list[str] = field(default_factory=list)
    exit_code: int = 0
