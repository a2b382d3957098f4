"""Shared fixtures: grids, nominal densities and solved demo configurations."""

from dataclasses import dataclass

import pytest

from band_model_lfd_package.data_models import LfdSolution
from band_model_lfd_package.demos import DEMOS, NOMINAL_H0, NOMINAL_H1, demo_spec
from band_model_lfd_package.grid_measure import Density, Grid, make_uniform_grid
from band_model_lfd_package.solver import SolverConfig, solve_lfds
from band_model_lfd_package.spec_file import BandSpec, parse_band_spec

# Test constants
TIGHT_CONFIG = SolverConfig(tol=1e-10, root_tol=1e-12, max_iter=1000)
GAUSSIAN_LO = -10.0
GAUSSIAN_HI = 10.0
GAUSSIAN_N = 2001


@dataclass(frozen=True, eq=False)
class DemoRun:
    """A parsed demo configuration with its solution."""

    spec: BandSpec
    solution: LfdSolution


def solve_demo(name: str, n: int | None = None, config: SolverConfig = TIGHT_CONFIG) -> DemoRun:
    """Parse and solve a named demo."""
    spec = parse_band_spec(demo_spec(name, n))
    return DemoRun(spec=spec, solution=solve_lfds(spec.band0, spec.band1, config))


@pytest.fixture(scope="session")
def gaussian_grid() -> Grid:
    """Grid of the Gaussian demos."""
    return make_uniform_grid(GAUSSIAN_LO, GAUSSIAN_HI, GAUSSIAN_N)


@pytest.fixture(scope="session")
def nominal_pair(gaussian_grid: Grid) -> tuple[Density, Density]:
    """Nominal densities N(-1, 2) and N(1, 2) on the demo grid."""
    return NOMINAL_H0.density(gaussian_grid), NOMINAL_H1.density(gaussian_grid)


@pytest.fixture(scope="session")
def censoring_run() -> DemoRun:
    """Censoring demo (upper 1.5 times nominal) solved tightly."""
    return solve_demo("censoring")


@pytest.fixture(scope="session")
def clipping_run() -> DemoRun:
    """Clipping demo (upper 10 times nominal) solved tightly."""
    return solve_demo("clipping")


@pytest.fixture(scope="session")
def huber_run() -> DemoRun:
    """Contamination demo with unbounded uppers solved tightly."""
    return solve_demo("huber")


@pytest.fixture(scope="session")
def spectrum_run() -> DemoRun:
    """Energy detector envelope demo solved tightly."""
    return solve_demo("spectrum")


@pytest.fixture(scope="session", params=list(DEMOS))
def any_demo_run(request: pytest.FixtureRequest) -> DemoRun:
    """Every named demo, each solved once per session."""
    return solve_demo(request.param)
