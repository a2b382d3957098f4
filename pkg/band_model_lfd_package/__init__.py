"""Least favorable densities and robust likelihood ratio tests for the density band model."""

__version__ = "0.1.0"

from band_model_lfd_package.bands import (
    DensityBand,
    band_from_bounds,
    band_from_contamination,
    band_from_envelope,
    band_from_scaled_nominal,
    contains,
    sample_feasible,
    sample_feasible_pairs,
)
from band_model_lfd_package.criteria import (
    CriteriaConfig,
    DivergenceKind,
    check_bound_attainment,
    check_l_dominance,
    check_stochastic_dominance,
    dual_upper_bound,
    f_divergence,
    l_lambda,
)
from band_model_lfd_package.data_models import LfdSolution, RatioTable, RegionClassification, RegionKind
from band_model_lfd_package.grid_measure import Density, Grid, integrate, make_uniform_grid
from band_model_lfd_package.solver import SolverConfig, clip_project, fixed_point_residual, solve_lfds
from band_model_lfd_package.statistic import ClassifierConfig, build_ratio, classify_regions, weighted_error

__all__ = [
    "ClassifierConfig",
    "CriteriaConfig",
    "Density",
    "DensityBand",
    "DivergenceKind",
    "Grid",
    "LfdSolution",
    "RatioTable",
    "RegionClassification",
    "RegionKind",
    "SolverConfig",
    "band_from_bounds",
    "band_from_contamination",
    "band_from_envelope",
    "band_from_scaled_nominal",
    "build_ratio",
    "check_bound_attainment",
    "check_l_dominance",
    "check_stochastic_dominance",
    "classify_regions",
    "clip_project",
    "contains",
    "dual_upper_bound",
    "f_divergence",
    "fixed_point_residual",
    "integrate",
    "l_lambda",
    "make_uniform_grid",
    "sample_feasible",
    "sample_feasible_pairs",
    "solve_lfds",
    "weighted_error",
]
