"""Optimality criteria used to certify that a computed pair is least favorable.

A least favorable pair maximizes the weighted minimum error ``L_lambda`` for every
lambda, stochastically dominates every other band member at every likelihood ratio
threshold and attains the dual upper bound built from the band envelopes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import StrEnum
from itertools import product
from typing import TYPE_CHECKING

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.special import rel_entr

from band_model_lfd_package.bands import DensityBand, contamination_rate, sample_feasible_pairs
from band_model_lfd_package.data_models import BoundRecord, DominanceReport, OptimalityReport
from band_model_lfd_package.errors import InvalidParameterError
from band_model_lfd_package.grid_measure import integrate
from band_model_lfd_package.solver import likelihood_ratio

if TYPE_CHECKING:
    from band_model_lfd_package.data_models import LfdSolution
    from band_model_lfd_package.grid_measure import Density

logger = logging.getLogger(__name__)

DEFAULT_ETA_POINTS = 50
CORNERS = tuple(product((0, 1), repeat=2))


@dataclass(frozen=True)
class CriteriaConfig:
    """Tolerances of the verification suites.

    Attributes:
        check_tol: Slack for inequalities that hold exactly on the grid
        attain_tol: Slack for the dual bound attainment, of the order of the grid spacing
    """

    check_tol: float = 1e-7
    attain_tol: float = 1e-4

    def __post_init__(self) -> None:
        """Validate the tolerances."""
        if not (self.check_tol >= 0 and self.attain_tol >= 0):
            msg = "Verification tolerances must be nonnegative."
            raise InvalidParameterError(msg)


class DivergenceKind(StrEnum):
    """Supported f-divergences."""

    KL = "kl"
    REVERSE_KL = "reverse-kl"
    TOTAL_VARIATION = "total-variation"
    SQUARED_HELLINGER = "squared-hellinger"
    CHI_SQUARED = "chi-squared"


def _require_lambda(lam: float) -> None:
    if not lam >= 0:
        msg = f"lambda must be nonnegative, got {lam}."
        raise InvalidParameterError(msg)


def l_lambda(p0: Density, p1: Density, lam: float) -> float:
    """Return the weighted minimum error ``integral of min(p0, lam * p1)``."""
    _require_lambda(lam)
    p0.grid.require_same(p1.grid)
    return integrate(np.minimum(p0.values, lam * p1.values), p0.grid)


def f_divergence(p0: Density, p1: Density, kind: DivergenceKind | str) -> float:
    """Return the f-divergence of ``p0`` from ``p1`` including the boundary term.

    The integral runs over ``{p1 > 0}``; mass of ``p0`` on ``{p1 = 0}`` is charged with
    ``f'(inf)``, which is infinite for the Kullback-Leibler and chi-squared kinds.

    Args:
        p0: First density
        p1: Reference density
        kind: Divergence kind, a DivergenceKind or its string value

    Returns:
        The divergence, possibly ``+inf``
    """
    p0.grid.require_same(p1.grid)
    try:
        kind = DivergenceKind(kind)
    except ValueError as exc:
        msg = f"Unknown divergence kind: {kind}"
        raise InvalidParameterError(msg) from exc

    a, b = p0.values, p1.values
    match kind:
        case DivergenceKind.KL:
            integrand = rel_entr(a, b)
        case DivergenceKind.REVERSE_KL:
            integrand = rel_entr(b, a)
        case DivergenceKind.TOTAL_VARIATION:
            integrand = np.abs(a - b)
        case DivergenceKind.SQUARED_HELLINGER:
            integrand = (np.sqrt(a) - np.sqrt(b)) ** 2
        case DivergenceKind.CHI_SQUARED:
            with np.errstate(divide="ignore", invalid="ignore"):
                integrand = np.where(b > 0, (a - b) ** 2 / np.where(b > 0, b, 1.0), np.where(a > 0, np.inf, 0.0))

    if np.any(np.isinf(integrand)):
        return float("inf")
    return integrate(integrand, p0.grid)


def _blend(band: DensityBand, v: float) -> NDArray[np.float64]:
    finite = np.isfinite(band.upper)
    blended = v * band.lower + (1.0 - v) * np.where(finite, band.upper, 0.0)
    if v < 1.0:
        blended = np.where(finite, blended, np.inf)
    return blended


def dual_upper_bound(band0: DensityBand, band1: DensityBand, lam: float, v0: float, v1: float) -> float:
    """Return the envelope bound on ``L_lambda`` over all band members.

    With ``qhat_i = v_i lower_i + (1 - v_i) upper_i`` the bound is
    ``integral of min(qhat0, lam qhat1) + v0 eps0 + lam v1 eps1``. An infinite upper
    envelope only enters where it carries weight, so the bound is ``+inf`` only if the
    integrand is.

    Args:
        band0: Band of the null hypothesis
        band1: Band of the alternative
        lam: Nonnegative weight of the second error
        v0: Envelope weight of the first band, in [0, 1]
        v1: Envelope weight of the second band, in [0, 1]

    Returns:
        The bound value
    """
    _require_lambda(lam)
    band0.grid.require_same(band1.grid)
    if not (0.0 <= v0 <= 1.0 and 0.0 <= v1 <= 1.0):
        msg = f"Envelope weights must lie in [0, 1], got v0={v0}, v1={v1}."
        raise InvalidParameterError(msg)
    qhat0 = _blend(band0, v0)
    qhat1 = _blend(band1, v1)
    scaled1 = lam * qhat1 if lam > 0 else np.zeros_like(qhat1)
    integrand = np.minimum(qhat0, scaled1)
    if np.any(np.isinf(integrand)):
        return float("inf")
    return integrate(integrand, band0.grid) + v0 * contamination_rate(band0) + lam * v1 * contamination_rate(band1)


def log_lambda_grid(lo: float, hi: float, n: int) -> NDArray[np.float64]:
    """Return ``n`` logarithmically spaced values in ``[lo, hi]``."""
    if not (0 < lo <= hi and np.isfinite(hi)) or n < 1:
        msg = f"Invalid log grid {lo}:{hi}:{n}."
        raise InvalidParameterError(msg)
    return np.geomspace(lo, hi, n)


def default_eta_grid(ratio: ArrayLike, n: int = DEFAULT_ETA_POINTS) -> NDArray[np.float64]:
    """Return ``n`` thresholds spread geometrically across the positive finite ratios."""
    values = np.asarray(ratio, dtype=np.float64)
    usable = values[np.isfinite(values) & (values > 0)]
    if usable.size == 0:
        return np.ones(1)
    return np.geomspace(usable.min(), usable.max(), n + 2)[1:-1]


def _lambda_values(lambda_grid: ArrayLike) -> NDArray[np.float64]:
    lams = np.atleast_1d(np.asarray(lambda_grid, dtype=np.float64))
    for lam in lams:
        _require_lambda(float(lam))
    return lams


def _corner_bounds(band0: DensityBand, band1: DensityBand, lam: float) -> list[float]:
    return [dual_upper_bound(band0, band1, lam, v0, v1) for v0, v1 in CORNERS]


def check_l_dominance(  # noqa: PLR0913
    sol: LfdSolution,
    band0: DensityBand,
    band1: DensityBand,
    lambda_grid: ArrayLike,
    n_samples: int,
    seed: int,
    *,
    config: CriteriaConfig | None = None,
    pairs: list[tuple[Density, Density]] | None = None,
) -> OptimalityReport:
    """Compare ``L_lambda`` at the solution with sampled band members and the dual bound.

    Passes if no sampled pair exceeds the solution value by more than ``check_tol``
    and the solution value stays below the best corner bound.

    Args:
        sol: Candidate least favorable pair
        band0: Band of the null hypothesis
        band1: Band of the alternative
        lambda_grid: Nonnegative lambda values
        n_samples: Number of pairs to draw when ``pairs`` is not given
        seed: Seed of the pair sampler
        config: Verification tolerances
        pairs: Pre-drawn band members, shared with other checks

    Returns:
        The optimality report
    """
    config = config or CriteriaConfig()
    lams = _lambda_values(lambda_grid)
    if pairs is None:
        pairs = sample_feasible_pairs(band0, band1, n_samples, seed)

    l_solution = np.array([l_lambda(sol.q0, sol.q1, lam) for lam in lams])
    bound_min = np.array([min(_corner_bounds(band0, band1, lam)) for lam in lams])
    if pairs:
        sampled = np.array([[l_lambda(p0, p1, lam) for lam in lams] for p0, p1 in pairs])
        max_sampled = sampled.max(axis=0)
        margin = float(np.min(l_solution - max_sampled))
    else:
        max_sampled = np.full(lams.size, -np.inf)
        margin = float("inf")

    below_bound = bool(np.all(l_solution <= bound_min + config.check_tol))
    passed = margin >= -config.check_tol and below_bound
    logger.info("L_lambda check over %d pairs: margin=%.3e, passed=%s", len(pairs), margin, passed)
    return OptimalityReport(
        lambda_grid=tuple(lams.tolist()),
        l_at_solution=tuple(l_solution.tolist()),
        max_l_over_samples=tuple(max_sampled.tolist()),
        bound_min=tuple(bound_min.tolist()),
        dominance_pass=passed,
        margin=margin,
        n_samples=len(pairs),
    )


def check_stochastic_dominance(  # noqa: PLR0913
    sol: LfdSolution,
    band0: DensityBand,
    band1: DensityBand,
    eta_grid: ArrayLike | None,
    n_samples: int,
    seed: int,
    *,
    config: CriteriaConfig | None = None,
    pairs: list[tuple[Density, Density]] | None = None,
) -> DominanceReport:
    """Check that the solution's ratio test has the largest error probabilities.

    For every threshold ``eta`` and sampled pair, ``Q0[r > eta] >= P0[r > eta]`` and
    ``Q1[r <= eta] >= P1[r <= eta]`` must hold within ``check_tol``, where ``r`` is the
    likelihood ratio of the solution. Undefined ratio points fall in the ``<=`` event.

    Args:
        sol: Candidate least favorable pair
        band0: Band of the null hypothesis
        band1: Band of the alternative
        eta_grid: Thresholds; ``None`` spreads them over the ratio range
        n_samples: Number of pairs to draw when ``pairs`` is not given
        seed: Seed of the pair sampler
        config: Verification tolerances
        pairs: Pre-drawn band members, shared with other checks

    Returns:
        The dominance report
    """
    config = config or CriteriaConfig()
    ratio, _ = likelihood_ratio(sol.q0.values, sol.q1.values)
    etas = default_eta_grid(ratio) if eta_grid is None else np.atleast_1d(np.asarray(eta_grid, dtype=np.float64))
    if pairs is None:
        pairs = sample_feasible_pairs(band0, band1, n_samples, seed)

    weights = sol.q0.grid.weights
    # rows: thresholds, columns: grid points; NaN compares False and joins the <= event
    above = (ratio[None, :] > etas[:, None]).astype(np.float64)
    below = 1.0 - above
    q0_above = above @ (weights * sol.q0.values)
    q1_below = below @ (weights * sol.q1.values)

    worst_h0 = worst_h1 = float("-inf")
    for p0, p1 in pairs:
        sol.q0.grid.require_same(p0.grid)
        worst_h0 = max(worst_h0, float(np.max(above @ (weights * p0.values) - q0_above)))
        worst_h1 = max(worst_h1, float(np.max(below @ (weights * p1.values) - q1_below)))

    passed = worst_h0 <= config.check_tol and worst_h1 <= config.check_tol
    logger.info(
        "Stochastic dominance over %d pairs and %d thresholds: worst=(%.3e, %.3e), passed=%s",
        len(pairs),
        etas.size,
        worst_h0,
        worst_h1,
        passed,
    )
    return DominanceReport(
        eta_grid=tuple(etas.tolist()),
        worst_violation_h0=worst_h0,
        worst_violation_h1=worst_h1,
        passed=passed,
        n_samples=len(pairs),
    )


def check_bound_attainment(
    sol: LfdSolution,
    band0: DensityBand,
    band1: DensityBand,
    lambda_grid: ArrayLike,
) -> tuple[BoundRecord, ...]:
    """Compare ``L_lambda`` at the solution with the best corner of the dual bound.

    Each record holds the gap ``best_bound - L_lambda`` and the minimizing corner
    ``(v0, v1)``; see ``bounds_attained`` for the pass criterion.
    """
    records = []
    for lam in _lambda_values(lambda_grid):
        value = l_lambda(sol.q0, sol.q1, float(lam))
        bounds = _corner_bounds(band0, band1, float(lam))
        best = int(np.argmin(bounds))
        records.append(
            BoundRecord(
                lam=float(lam),
                l_value=value,
                best_bound=bounds[best],
                gap=bounds[best] - value,
                corner=CORNERS[best],
            ),
        )
    return tuple(records)


def bounds_attained(records: tuple[BoundRecord, ...], config: CriteriaConfig | None = None) -> bool:
    """Return True if every gap lies in ``[-check_tol, attain_tol]``."""
    config = config or CriteriaConfig()
    return all(-config.check_tol <= record.gap <= config.attain_tol for record in records)
