"""Property-based tests on randomly drawn bands."""

from dataclasses import replace

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from band_model_lfd_package.bands import DensityBand, band_from_contamination, band_from_scaled_nominal, contains
from band_model_lfd_package.criteria import l_lambda
from band_model_lfd_package.data_models import LfdSolution
from band_model_lfd_package.errors import MaxIterationsExceededError
from band_model_lfd_package.grid_measure import Density, Grid, gaussian_density, make_uniform_grid
from band_model_lfd_package.solver import SolverConfig, clip_project, g_eval, solve_lfds

# Test constants
GRID = make_uniform_grid(0.0, 1.0, 12)
PROPERTY_CONFIG = SolverConfig(tol=1e-9, max_iter=300)
TV_SLACK = 1e-9
PROJECTION_TOL = 1e-9
IDEMPOTENCE_TOL = 1e-12
MIXTURE_GRID = make_uniform_grid(-10.0, 10.0, 401)
MIXTURE_CONFIG = SolverConfig(tol=1e-8, max_iter=300)

values = st.lists(
    st.floats(min_value=0.05, max_value=1.0, allow_nan=False, allow_infinity=False),
    min_size=GRID.size,
    max_size=GRID.size,
)
lower_factors = st.floats(min_value=0.5, max_value=1.0)
upper_factors = st.floats(min_value=1.0, max_value=5.0)


def _density(raw: list[float], grid: Grid = GRID) -> Density:
    return Density(grid, np.asarray(raw)).normalized()


@st.composite
def bands(draw: st.DrawFn) -> DensityBand:
    """A scaled band around a random nominal."""
    return band_from_scaled_nominal(_density(draw(values)), draw(lower_factors), draw(upper_factors))


@st.composite
def mixture_bands(draw: st.DrawFn) -> DensityBand:
    """A scaled or contamination band around a random Gaussian mixture."""
    components = draw(st.integers(min_value=1, max_value=3))
    mixture = np.zeros(MIXTURE_GRID.size)
    for _ in range(components):
        weight = draw(st.floats(min_value=0.1, max_value=1.0))
        mean = draw(st.floats(min_value=-3.0, max_value=3.0))
        sd = draw(st.floats(min_value=0.5, max_value=2.0))
        mixture += weight * gaussian_density(MIXTURE_GRID, mean, sd).values
    nominal = Density(MIXTURE_GRID, mixture).normalized()
    if draw(st.booleans()):
        return band_from_contamination(nominal, draw(st.floats(min_value=0.0, max_value=0.3)))
    return band_from_scaled_nominal(nominal, draw(lower_factors), draw(upper_factors))


def _solve(band0: DensityBand, band1: DensityBand, config: SolverConfig = PROPERTY_CONFIG) -> LfdSolution:
    try:
        return solve_lfds(band0, band1, config)
    except MaxIterationsExceededError as exc:
        return exc.partial


@given(bands(), bands())
@settings(max_examples=60, deadline=None)
def test_total_variation_never_increases(band0: DensityBand, band1: DensityBand) -> None:
    """Each alternating projection step can only shrink the distance between the pair."""
    solution = _solve(band0, band1)
    full = np.asarray(solution.tv_history)
    half = np.asarray(solution.tv_half_history)
    assert np.all(np.diff(full) <= TV_SLACK)  # noqa: S101
    assert np.all(half <= full[:-1] + TV_SLACK)  # noqa: S101
    assert np.all(full[1:] <= half + TV_SLACK)  # noqa: S101
    assert contains(band0, solution.q0, band_tol=PROJECTION_TOL)  # noqa: S101
    assert contains(band1, solution.q1, band_tol=PROJECTION_TOL)  # noqa: S101


@given(mixture_bands(), mixture_bands(), st.sampled_from([0.0, 1.0]))
@settings(max_examples=60, deadline=None)
def test_total_variation_never_increases_on_mixtures(band0: DensityBand, band1: DensityBand, alpha: float) -> None:
    """TV monotonicity holds for Gaussian-mixture bands, unbounded uppers and both alpha values."""
    solution = _solve(band0, band1, replace(MIXTURE_CONFIG, alpha=alpha))
    full = np.asarray(solution.tv_history)
    assert np.all(np.diff(full) <= TV_SLACK)  # noqa: S101
    assert np.all(np.asarray(solution.tv_half_history) <= full[:-1] + TV_SLACK)  # noqa: S101
    assert contains(band0, solution.q0, band_tol=PROJECTION_TOL)  # noqa: S101
    assert contains(band1, solution.q1, band_tol=PROJECTION_TOL)  # noqa: S101


@given(bands(), values, st.floats(min_value=0.0, max_value=20.0), st.floats(min_value=0.0, max_value=20.0))
@settings(max_examples=200, deadline=None)
def test_g_is_monotone_and_lipschitz(band: DensityBand, raw: list[float], a: float, b: float) -> None:
    """g grows with c at most as fast as the reference mass."""
    ref = np.asarray(raw)
    lo, hi = min(a, b), max(a, b)
    step = g_eval(hi, ref, band) - g_eval(lo, ref, band)
    ref_mass = float(np.sum(GRID.weights * ref))
    assert -1e-12 <= step <= (hi - lo) * ref_mass + 1e-12  # noqa: S101


@given(bands(), values)
@settings(max_examples=100, deadline=None)
def test_projection_is_idempotent(band: DensityBand, raw: list[float]) -> None:
    """Projecting a band member again leaves it unchanged."""
    projected, _ = clip_project(np.asarray(raw), band)
    assert contains(band, projected, band_tol=PROJECTION_TOL)  # noqa: S101
    again, c = clip_project(projected, band)
    assert_allclose(again.values, projected.values, rtol=0, atol=IDEMPOTENCE_TOL)
    assert c > 0  # noqa: S101


@given(values, values, st.floats(min_value=0.0, max_value=50.0), st.floats(min_value=0.0, max_value=50.0))
@settings(max_examples=200, deadline=None)
def test_l_lambda_is_concave_and_bounded(raw0: list[float], raw1: list[float], a: float, b: float) -> None:
    """L_lambda is concave in lambda and never exceeds min(1, lambda)."""
    p0, p1 = _density(raw0), _density(raw1)
    midpoint = l_lambda(p0, p1, 0.5 * (a + b))
    assert midpoint >= 0.5 * (l_lambda(p0, p1, a) + l_lambda(p0, p1, b)) - 1e-12  # noqa: S101
    assert l_lambda(p0, p1, a) <= min(1.0, a) + 1e-12  # noqa: S101
