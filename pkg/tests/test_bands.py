"""Tests for density band construction, validation and sampling."""

import numpy as np
import pytest
from numpy.testing import assert_allclose

from band_model_lfd_package.bands import (
    band_from_bounds,
    band_from_contamination,
    band_from_envelope,
    band_from_scaled_nominal,
    contains,
    contamination_rate,
    sample_extreme,
    sample_feasible,
    sample_feasible_pairs,
)
from band_model_lfd_package.criteria import check_l_dominance
from band_model_lfd_package.errors import (
    GridMismatchError,
    InvalidParameterError,
    LowerMassExceedsOneError,
    OrderingViolationError,
    UpperMassBelowOneError,
)
from band_model_lfd_package.grid_measure import Density, Grid, make_counting_grid, make_uniform_grid
from band_model_lfd_package.nominal_models import GaussianNominal
from band_model_lfd_package.solver import solve_lfds
from tests.conftest import TIGHT_CONFIG

# Test constants
LOWER_FACTOR = 0.8
UPPER_FACTOR = 1.5
EPS = 0.2
N_SAMPLES = 12
SEED = 7
SAMPLE_SEEDS = (0, 1, 2, 3, 4)
WIDE_LOWER_FACTOR = 0.5
WIDE_UPPER_FACTOR = 2.0
TWO_POINT_BAND0 = ([0.4, 0.2], [0.7, 0.5])
TWO_POINT_BAND1 = ([0.1, 0.5], [0.3, 0.8])
TWO_POINT_LAMBDAS = (0.5, 1.0, 2.0)
TWO_POINT_SAMPLES = 4


def test_scaled_band_masses(nominal_pair: tuple[Density, Density]) -> None:
    """Scaled bands carry the scaled nominal masses."""
    p0, _ = nominal_pair
    band = band_from_scaled_nominal(p0, LOWER_FACTOR, UPPER_FACTOR)
    assert band.lower_mass == pytest.approx(LOWER_FACTOR)  # noqa: S101
    assert band.upper_mass == pytest.approx(UPPER_FACTOR)  # noqa: S101
    assert contamination_rate(band) == pytest.approx(1 - LOWER_FACTOR)  # noqa: S101
    assert contains(band, p0)  # noqa: S101


def test_contamination_band_has_infinite_upper(nominal_pair: tuple[Density, Density]) -> None:
    """Contamination without a cap leaves the upper envelope unbounded."""
    p0, _ = nominal_pair
    band = band_from_contamination(p0, EPS)
    assert band.has_infinite_upper  # noqa: S101
    assert np.isinf(band.upper_mass)  # noqa: S101
    assert contamination_rate(band) == pytest.approx(EPS)  # noqa: S101


def test_contamination_band_rejects_bad_rates(nominal_pair: tuple[Density, Density]) -> None:
    """Rates outside [0, 1] and caps below the nominal are rejected."""
    p0, _ = nominal_pair
    with pytest.raises(InvalidParameterError):
        band_from_contamination(p0, 1.5)
    with pytest.raises(OrderingViolationError):
        band_from_contamination(p0, EPS, cap=0.5 * p0.values)


def test_scaled_band_rejects_factor_order(nominal_pair: tuple[Density, Density]) -> None:
    """Factors must satisfy lo <= 1 <= hi."""
    p0, _ = nominal_pair
    with pytest.raises(InvalidParameterError):
        band_from_scaled_nominal(p0, 1.2, 1.5)


def test_band_validation_errors(gaussian_grid: Grid) -> None:
    """Ordering and mass conditions are enforced."""
    width = gaussian_grid.total_weight
    with pytest.raises(OrderingViolationError):
        band_from_bounds(2.0 / width, 1.0 / width, gaussian_grid)
    with pytest.raises(LowerMassExceedsOneError):
        band_from_bounds(1.5 / width, 2.0 / width, gaussian_grid)
    with pytest.raises(UpperMassBelowOneError):
        band_from_bounds(0.0, 0.5 / width, gaussian_grid)


def test_band_rejects_grid_length_mismatch(gaussian_grid: Grid) -> None:
    """Envelope arrays must match the grid."""
    with pytest.raises(ValueError, match="expected"):
        band_from_bounds(np.zeros(3), np.ones(3), gaussian_grid)


def test_envelope_band_contains_every_member() -> None:
    """The pointwise min and max of a family bracket each member exactly."""
    grid = make_uniform_grid(-10.0, 10.0, 501)
    family = [GaussianNominal(mean=m, sd=2.0).density(grid) for m in np.linspace(-1.0, 1.0, 5)]
    band = band_from_envelope(family)
    assert all(contains(band, member) for member in family)  # noqa: S101
    assert band.lower_mass < 1.0 < band.upper_mass  # noqa: S101


def test_envelope_rejects_empty_and_mixed_grids(gaussian_grid: Grid) -> None:
    """Empty families and members on different grids are rejected."""
    with pytest.raises(InvalidParameterError):
        band_from_envelope([])
    other = GaussianNominal(mean=0.0, sd=1.0).density(make_uniform_grid(-5.0, 5.0, 11))
    with pytest.raises(GridMismatchError):
        band_from_envelope([GaussianNominal(mean=0.0, sd=1.0).density(gaussian_grid), other])


def test_singleton_band(nominal_pair: tuple[Density, Density]) -> None:
    """Equal envelopes admit exactly the nominal."""
    p0, _ = nominal_pair
    band = band_from_scaled_nominal(p0, 1.0, 1.0)
    assert band.is_singleton()  # noqa: S101
    sample = sample_feasible(band, SEED)
    assert_allclose(sample.density.values, p0.values)


def test_contains_rejects_outside_members(nominal_pair: tuple[Density, Density]) -> None:
    """A density of another band is not contained."""
    p0, p1 = nominal_pair
    band = band_from_scaled_nominal(p0, LOWER_FACTOR, UPPER_FACTOR)
    assert not contains(band, p1)  # noqa: S101


@pytest.mark.parametrize("seed", SAMPLE_SEEDS)
def test_samples_are_band_members(nominal_pair: tuple[Density, Density], seed: int) -> None:
    """Uniform and threshold-shaped draws land inside the band with unit mass."""
    p0, _ = nominal_pair
    for band in (band_from_scaled_nominal(p0, LOWER_FACTOR, UPPER_FACTOR), band_from_contamination(p0, EPS)):
        for draw in (sample_feasible, sample_extreme):
            sample = draw(band, seed)
            assert contains(band, sample.density, band_tol=1e-12)  # noqa: S101
            assert sample.projection_constant > 0  # noqa: S101


def test_sampling_is_deterministic(nominal_pair: tuple[Density, Density]) -> None:
    """Equal seeds give equal samples."""
    p0, p1 = nominal_pair
    band0 = band_from_contamination(p0, EPS)
    band1 = band_from_contamination(p1, EPS)
    first = sample_feasible_pairs(band0, band1, N_SAMPLES, SEED)
    second = sample_feasible_pairs(band0, band1, N_SAMPLES, SEED)
    assert len(first) == N_SAMPLES  # noqa: S101
    for (a0, a1), (b0, b1) in zip(first, second, strict=True):
        assert np.array_equal(a0.values, b0.values)  # noqa: S101
        assert np.array_equal(a1.values, b1.values)  # noqa: S101


def test_extreme_samples_move_mass_to_a_half_line(nominal_pair: tuple[Density, Density]) -> None:
    """Threshold-shaped members sit on the lower envelope on one side."""
    p0, _ = nominal_pair
    band = band_from_contamination(p0, EPS)
    sample = sample_extreme(band, SEED).density
    at_lower = np.isclose(sample.values, band.lower, rtol=0.0, atol=1e-12)
    assert at_lower.any()  # noqa: S101
    assert not at_lower.all()  # noqa: S101


def test_seeds_give_distinct_members(nominal_pair: tuple[Density, Density]) -> None:
    """Different seeds on a wide band give different members."""
    p0, _ = nominal_pair
    band = band_from_scaled_nominal(p0, WIDE_LOWER_FACTOR, WIDE_UPPER_FACTOR)
    first = sample_feasible(band, SAMPLE_SEEDS[0]).density
    second = sample_feasible(band, SAMPLE_SEEDS[1]).density
    assert contains(band, first, band_tol=1e-12)  # noqa: S101
    assert contains(band, second, band_tol=1e-12)  # noqa: S101
    assert not np.array_equal(first.values, second.values)  # noqa: S101


def test_two_point_grid_sampling() -> None:
    """Threshold-shaped draws and the sampled checks work on a two-point counting grid."""
    grid = make_counting_grid([0, 1])
    band0 = band_from_bounds(*TWO_POINT_BAND0, grid)
    band1 = band_from_bounds(*TWO_POINT_BAND1, grid)
    for seed in SAMPLE_SEEDS:
        assert contains(band0, sample_extreme(band0, seed).density, band_tol=1e-12)  # noqa: S101
    solution = solve_lfds(band0, band1, TIGHT_CONFIG)
    assert_allclose(solution.q0.values, [0.5, 0.5], atol=1e-8)
    assert_allclose(solution.q1.values, [0.3, 0.7], atol=1e-8)
    report = check_l_dominance(solution, band0, band1, TWO_POINT_LAMBDAS, TWO_POINT_SAMPLES, SEED)
    assert report.n_samples == TWO_POINT_SAMPLES  # noqa: S101
    assert report.dominance_pass  # noqa: S101
