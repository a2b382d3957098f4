"""Named demo configurations, each expressed as a band spec document.

The Gaussian demos share the nominals N(-1, 2) and N(1, 2) (mean, standard
deviation) with lower envelopes at 0.8 times the nominal; they differ in the upper
factor, which selects the shape of the robust test. The spectrum demo spans
energy-detector densities over a range of noise and signal powers.
"""

from __future__ import annotations

from collections.abc import Callable
from itertools import product
from typing import Any

import numpy as np
from numpy.typing import NDArray

from band_model_lfd_package.errors import InvalidParameterError
from band_model_lfd_package.grid_measure import Grid
from band_model_lfd_package.nominal_models import EnergyNoiseNominal, EnergySignalNominal, GaussianNominal

GAUSSIAN_SUPPORT = (-10.0, 10.0)
GAUSSIAN_POINTS = 2001
SPECTRUM_SUPPORT = (0.0, 30.0)
SPECTRUM_POINTS = 3000

NOMINAL_H0 = GaussianNominal(mean=-1.0, sd=2.0)
NOMINAL_H1 = GaussianNominal(mean=1.0, sd=2.0)
LOWER_FACTOR = 0.8
HUBER_EPS = 0.2

NOISE_POWERS = tuple(np.linspace(1.0, 2.0, 21).tolist())
SIGNAL_POWERS = tuple(np.linspace(4.0, 6.0, 21).tolist())
SPECTRUM_REFERENCE_H0 = EnergyNoiseNominal(sigw2=2.0)
SPECTRUM_REFERENCE_H1 = EnergySignalNominal(sigw2=2.0, sigs2=4.0)


def _grid_spec(support: tuple[float, float], n: int) -> dict[str, Any]:
    return {"lo": support[0], "hi": support[1], "n": n}


def _scaled_gaussian_spec(hi_factor: float, n: int | None) -> dict[str, Any]:
    return {
        "grid": _grid_spec(GAUSSIAN_SUPPORT, n or GAUSSIAN_POINTS),
        "bands": [
            {"kind": "scaled_nominal", "nominal": nominal.to_spec(), "lo_factor": LOWER_FACTOR, "hi_factor": hi_factor}
            for nominal in (NOMINAL_H0, NOMINAL_H1)
        ],
    }


def _huber_spec(n: int | None) -> dict[str, Any]:
    return {
        "grid": _grid_spec(GAUSSIAN_SUPPORT, n or GAUSSIAN_POINTS),
        "bands": [
            {"kind": "contamination", "nominal": nominal.to_spec(), "eps": HUBER_EPS, "cap_factor": "inf"}
            for nominal in (NOMINAL_H0, NOMINAL_H1)
        ],
    }


def _spectrum_spec(n: int | None) -> dict[str, Any]:
    noise_family = [EnergyNoiseNominal(sigw2=w).to_spec() for w in NOISE_POWERS]
    signal_family = [EnergySignalNominal(sigw2=w, sigs2=s).to_spec() for w, s in product(NOISE_POWERS, SIGNAL_POWERS)]
    return {
        "grid": _grid_spec(SPECTRUM_SUPPORT, n or SPECTRUM_POINTS),
        "bands": [
            {"kind": "envelope", "family": noise_family},
            {"kind": "envelope", "family": signal_family},
        ],
    }


DEMOS: dict[str, Callable[[int | None], dict[str, Any]]] = {
    "clipping": lambda n: _scaled_gaussian_spec(10.0, n),
    "censoring": lambda n: _scaled_gaussian_spec(1.5, n),
    "compress-tight": lambda n: _scaled_gaussian_spec(1.2, n),
    "compress-loose": lambda n: _scaled_gaussian_spec(2.5, n),
    "huber": _huber_spec,
    "spectrum": _spectrum_spec,
}


def demo_spec(name: str, n: int | None = None) -> dict[str, Any]:
    """Return the spec document of the named demo.

    Args:
        name: One of the keys of ``DEMOS``
        n: Grid size override; defaults to the demo's own resolution

    Returns:
        A document accepted by ``parse_band_spec``
    """
    builder = DEMOS.get(name)
    if builder is None:
        msg = f"Unknown demo {name!r}; choose from {', '.join(DEMOS)}."
        raise InvalidParameterError(msg)
    return builder(n)


def demo_reference_columns(name: str, grid: Grid) -> dict[str, NDArray[np.float64]]:
    """Return extra figure columns for a demo.

    The spectrum demo carries the closed-form least favorable pair for
    ``sigw2 = 2``, ``sigs2 = 4`` so it can be plotted against the computed one.
    """
    if name != "spectrum":
        return {}
    return {
        "q0_closed_form": np.asarray(SPECTRUM_REFERENCE_H0.density(grid).values),
        "q1_closed_form": np.asarray(SPECTRUM_REFERENCE_H1.density(grid).values),
    }
