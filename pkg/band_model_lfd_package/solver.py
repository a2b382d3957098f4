"""Least favorable densities for the band model via fixed-point iteration.

Each update clip-projects a scaled reference onto one band,
``q = min(upper, max(c * ref, lower))``, with ``c`` chosen by bisection so the result
has unit mass. Alternating the two projections converges to a least favorable pair.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import ArrayLike, NDArray

from band_model_lfd_package.bands import DensityBand, contains
from band_model_lfd_package.data_models import LfdSolution
from band_model_lfd_package.errors import (
    InfeasibleBandsError,
    InvalidParameterError,
    MaxIterationsExceededError,
    NoRootError,
)
from band_model_lfd_package.grid_measure import Density, integrate

logger = logging.getLogger(__name__)

ALPHA_FALLBACK = 1.0


@dataclass(frozen=True)
class SolverConfig:
    """Configuration of the fixed-point solver.

    Attributes:
        alpha: Weight of a density's own previous iterate in its reference
        tol: Sup-norm termination tolerance between successive iterates
        root_tol: Tolerance on |g| for the clip constant bisection
        max_iter: Cap on fixed-point steps
        c_max: Ceiling of the bracket search when alpha is zero
        auto_alpha: Retry with alpha = 1 when no root exists at the requested alpha
        tv_slack: Allowed increase of the total variation history
        ratio_tol: Relative tolerance for likelihood ratio level checks
        max_bisect: Cap on bisection steps per root search
    """

    alpha: float = 0.0
    tol: float = 1e-6
    root_tol: float = 1e-10
    max_iter: int = 100
    c_max: float = 1e12
    auto_alpha: bool = True
    tv_slack: float = 1e-9
    ratio_tol: float = 1e-6
    max_bisect: int = 200

    def __post_init__(self) -> None:
        """Validate the configuration."""
        if not self.alpha >= 0:
            msg = f"alpha must be nonnegative, got {self.alpha}."
            raise InvalidParameterError(msg)
        if not (self.tol > 0 and self.root_tol > 0 and self.tv_slack >= 0 and self.ratio_tol > 0):
            msg = "Tolerances must be positive."
            raise InvalidParameterError(msg)
        if self.max_iter < 1 or self.max_bisect < 1:
            msg = "max_iter and max_bisect must be at least one."
            raise InvalidParameterError(msg)
        if not self.c_max > 1:
            msg = f"c_max must exceed one, got {self.c_max}."
            raise InvalidParameterError(msg)


def _clip(c: float, ref: NDArray[np.float64], band: DensityBand) -> NDArray[np.float64]:
    return np.minimum(band.upper, np.maximum(c * ref, band.lower))


def _reference(ref: ArrayLike | Density, band: DensityBand) -> NDArray[np.float64]:
    if isinstance(ref, Density):
        band.grid.require_same(ref.grid)
        return np.asarray(ref.values)
    values = band.grid.check_values(ref, "reference")
    if not np.all(np.isfinite(values)) or np.any(values < 0):
        msg = "Reference must be finite and nonnegative."
        raise InvalidParameterError(msg)
    return values


def g_eval(c: float, ref: ArrayLike | Density, band: DensityBand) -> float:
    """Return the mass defect of the clip projection at constant ``c``.

    ``g(c) = integral of min(upper, max(c * ref, lower)) - 1``; nondecreasing and
    continuous in ``c``.
    """
    return integrate(_clip(c, _reference(ref, band), band), band.grid) - 1.0


def find_root_c(ref: ArrayLike | Density, band: DensityBand, cfg: SolverConfig | None = None) -> float:
    """Find a positive clip constant with ``|g(c)| <= root_tol`` by bisection.

    The bracket starts at ``1/alpha`` (or 1 when alpha is zero) and is doubled until
    ``g`` turns nonnegative or ``c_max`` is reached.

    Args:
        ref: Nonnegative reference function
        band: Band to project onto
        cfg: Solver configuration

    Returns:
        The clip constant
    """
    cfg = cfg or SolverConfig()
    values = _reference(ref, band)

    def g(c: float) -> float:
        return integrate(_clip(c, values, band), band.grid) - 1.0

    # envelopes validated within MASS_TOL of one cannot hit root_tol exactly
    root_tol = cfg.root_tol + max(0.0, band.lower_mass - 1.0, 1.0 - band.upper_mass)
    lo, g_lo = 0.0, g(0.0)
    if g_lo > root_tol:
        msg = f"Lower envelope mass {band.lower_mass:.10g} exceeds one; band is infeasible."
        raise InfeasibleBandsError(msg)

    hi = 1.0 / cfg.alpha if cfg.alpha > 0 else 1.0
    g_hi = g(hi)
    while g_hi < -root_tol:
        if hi >= cfg.c_max:
            msg = (
                f"No clip constant up to c_max={cfg.c_max:g} (g={g_hi:.3e}) at alpha={cfg.alpha:g}; "
                "the joint support of the bands is too small. Rerun with a positive alpha, e.g. alpha=1."
            )
            raise NoRootError(msg)
        lo, g_lo = hi, g_hi
        hi = min(2.0 * hi, cfg.c_max)
        g_hi = g(hi)
        logger.debug("Expanded bracket to [%g, %g], g(hi)=%.3e", lo, hi, g_hi)

    if abs(g_hi) <= root_tol:
        return hi

    best_c, best_g = hi, g_hi
    for _ in range(cfg.max_bisect):
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        if abs(g_mid) < abs(best_g) and mid > 0:
            best_c, best_g = mid, g_mid
        if abs(g_mid) <= root_tol and mid > 0:
            return mid
        if g_mid < 0:
            lo = mid
        else:
            hi = mid
    logger.warning("Bisection stopped after %d steps with |g|=%.3e.", cfg.max_bisect, abs(best_g))
    return best_c


def clip_project(
    ref: ArrayLike | Density,
    band: DensityBand,
    cfg: SolverConfig | None = None,
) -> tuple[Density, float]:
    """Project a reference onto a band, ``min(upper, max(c * ref, lower))``.

    The result is the unique member of the band that minimizes every f-divergence to
    the reference.

    Args:
        ref: Nonnegative reference function
        band: Band to project onto
        cfg: Solver configuration

    Returns:
        The projected density and its clip constant
    """
    values = _reference(ref, band)
    c = find_root_c(values, band, cfg)
    return Density(band.grid, _clip(c, values, band)), c


def likelihood_ratio(
    q0: ArrayLike,
    q1: ArrayLike,
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    """Return ``q1 / q0`` with the ratio conventions and the undefined mask.

    ``q0 = 0 < q1`` maps to ``+inf``, ``q1 = 0 < q0`` to 0 and ``0 / 0`` to NaN, flagged
    in the returned mask.
    """
    num = np.asarray(q1, dtype=np.float64)
    den = np.asarray(q0, dtype=np.float64)
    undefined = (num == 0) & (den == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    ratio = np.where(undefined, np.nan, ratio)
    return ratio, undefined


def total_variation(p: Density, q: Density) -> float:
    """L1 distance between two densities on a shared grid."""
    p.grid.require_same(q.grid)
    return integrate(np.abs(p.values - q.values), p.grid)


def _initial_pair(
    band0: DensityBand,
    band1: DensityBand,
    cfg: SolverConfig,
    init: tuple[Density, Density] | None,
) -> tuple[Density, Density]:
    if init is not None:
        q0, q1 = init
        if not (contains(band0, q0, cfg.root_tol) and contains(band1, q1, cfg.root_tol)):
            msg = "Initial densities must lie inside their bands."
            raise InvalidParameterError(msg)
        return q0, q1
    uniform = np.ones(band0.grid.size)
    try:
        q0, _ = clip_project(uniform, band0, cfg)
        q1, _ = clip_project(uniform, band1, cfg)
    except NoRootError as exc:
        msg = f"No feasible starting densities: {exc}"
        raise InfeasibleBandsError(msg) from exc
    return q0, q1


def _iterate(
    band0: DensityBand,
    band1: DensityBand,
    init: tuple[Density, Density],
    cfg: SolverConfig,
) -> LfdSolution:
    alpha = cfg.alpha
    q0, q1 = init
    c0 = c1 = float("nan")
    tv_history = [total_variation(q0, q1)]
    tv_half_history: list[float] = []

    for n in range(1, cfg.max_iter + 1):
        new_q0, c0 = clip_project(alpha * q0.values + q1.values, band0, cfg)
        tv_half_history.append(total_variation(new_q0, q1))
        new_q1, c1 = clip_project(new_q0.values + alpha * q1.values, band1, cfg)
        step = max(
            float(np.max(np.abs(new_q0.values - q0.values))),
            float(np.max(np.abs(new_q1.values - q1.values))),
        )
        q0, q1 = new_q0, new_q1
        tv_history.append(total_variation(q0, q1))
        logger.debug("Iteration %d: step=%.3e c0=%.8g c1=%.8g tv=%.10g", n, step, c0, c1, tv_history[-1])

        if step <= cfg.tol:
            solution = LfdSolution(
                q0=q0,
                q1=q1,
                c0=c0,
                c1=c1,
                alpha=alpha,
                iterations=n,
                residual=0.0,
                tv_history=tuple(tv_history),
                tv_half_history=tuple(tv_half_history),
                band0=band0,
                band1=band1,
            )
            return replace(solution, residual=fixed_point_residual(solution, band0, band1))

    partial = LfdSolution(
        q0=q0,
        q1=q1,
        c0=c0,
        c1=c1,
        alpha=alpha,
        iterations=cfg.max_iter,
        residual=float("nan"),
        tv_history=tuple(tv_history),
        tv_half_history=tuple(tv_half_history),
        band0=band0,
        band1=band1,
        converged=False,
    )
    partial = replace(partial, residual=fixed_point_residual(partial, band0, band1))
    msg = f"No convergence within {cfg.max_iter} iterations (residual {partial.residual:.3e})."
    raise MaxIterationsExceededError(msg, partial)


def solve_lfds(
    band0: DensityBand,
    band1: DensityBand,
    cfg: SolverConfig | None = None,
    init: tuple[Density, Density] | None = None,
) -> LfdSolution:
    """Compute a least favorable pair for two density bands.

    Runs the alternating clip projections at ``cfg.alpha``; if no clip constant
    exists there and ``auto_alpha`` is set, the run is repeated with alpha = 1,
    which always admits constants in (0, 1].

    Args:
        band0: Band of the null hypothesis
        band1: Band of the alternative
        cfg: Solver configuration
        init: Optional feasible starting pair

    Returns:
        The converged solution
    """
    cfg = cfg or SolverConfig()
    band0.grid.require_same(band1.grid)
    start = _initial_pair(band0, band1, cfg, init)
    logger.info("Solving for least favorable densities on %d grid points, alpha=%g.", band0.grid.size, cfg.alpha)
    try:
        solution = _iterate(band0, band1, start, cfg)
    except NoRootError:
        if not cfg.auto_alpha or cfg.alpha >= ALPHA_FALLBACK:
            raise
        logger.warning("No clip constant at alpha=%g; retrying with alpha=%g.", cfg.alpha, ALPHA_FALLBACK)
        solution = _iterate(band0, band1, start, replace(cfg, alpha=ALPHA_FALLBACK))
        solution = replace(solution, alpha_escalated=True)
    logger.info(
        "Converged after %d iterations: c0=%.8g c1=%.8g residual=%.3e",
        solution.iterations,
        solution.c0,
        solution.c1,
        solution.residual,
    )
    return solution


def fixed_point_residual(sol: LfdSolution, band0: DensityBand, band1: DensityBand) -> float:
    """Return the sup-norm defect of the fixed-point equations at ``sol``.

    Both ``q0 - min(upper0, max(c0 (alpha q0 + q1), lower0))`` and the analogous
    expression for ``q1`` are evaluated at the stored densities and constants.
    """
    q0 = sol.q0.values
    q1 = sol.q1.values
    rhs0 = _clip(sol.c0, sol.alpha * q0 + q1, band0)
    rhs1 = _clip(sol.c1, q0 + sol.alpha * q1, band1)
    return max(float(np.max(np.abs(q0 - rhs0))), float(np.max(np.abs(q1 - rhs1))))
