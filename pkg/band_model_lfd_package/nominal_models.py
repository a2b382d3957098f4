"""Parametric nominal densities used to build density bands.

Provides a common API for the closed-form families the band constructors and spec
files refer to, so a band can be described by a model and evaluated on any grid.
"""

import abc
from dataclasses import dataclass
from typing import Any, ClassVar, Literal

from band_model_lfd_package.errors import InvalidParameterError
from band_model_lfd_package.grid_measure import (
    Density,
    Grid,
    exp_energy_density_h0,
    exp_energy_density_h1,
    gaussian_density,
)

NominalKind = Literal["gaussian", "exp_h0", "exp_h1"]


class NominalModel(abc.ABC):
    """Abstract base class for a nominal density family member."""

    kind: ClassVar[NominalKind]

    @abc.abstractmethod
    def density(self, grid: Grid) -> Density:
        """Evaluate the (renormalized) density on ``grid``."""

    @abc.abstractmethod
    def parameters(self) -> dict[str, float]:
        """Return the parameters keyed as in a band spec document."""

    def to_spec(self) -> dict[str, dict[str, float]]:
        """Return the spec-document form ``{kind: {param: value}}``."""
        return {self.kind: self.parameters()}


@dataclass(frozen=True)
class GaussianNominal(NominalModel):
    """Gaussian density with mean ``mean`` and standard deviation ``sd``."""

    kind: ClassVar[NominalKind] = "gaussian"

    mean: float
    sd: float

    def density(self, grid: Grid) -> Density:
        """Evaluate on ``grid``."""
        return gaussian_density(grid, self.mean, self.sd)

    def parameters(self) -> dict[str, float]:
        """Return the spec parameters."""
        return {"mean": self.mean, "sd": self.sd}


@dataclass(frozen=True)
class EnergyNoiseNominal(NominalModel):
    """Energy detector statistic under noise only, noise power ``sigw2``."""

    kind: ClassVar[NominalKind] = "exp_h0"

    sigw2: float

    def density(self, grid: Grid) -> Density:
        """Evaluate on ``grid``."""
        return exp_energy_density_h0(grid, self.sigw2)

    def parameters(self) -> dict[str, float]:
        """Return the spec parameters."""
        return {"sigw2": self.sigw2}


@dataclass(frozen=True)
class EnergySignalNominal(NominalModel):
    """Energy detector statistic with signal power ``sigs2`` in noise ``sigw2``."""

    kind: ClassVar[NominalKind] = "exp_h1"

    sigw2: float
    sigs2: float

    def density(self, grid: Grid) -> Density:
        """Evaluate on ``grid``."""
        return exp_energy_density_h1(grid, self.sigw2, self.sigs2)

    def parameters(self) -> dict[str, float]:
        """Return the spec parameters."""
        return {"sigw2": self.sigw2, "sigs2": self.sigs2}


_MODELS: dict[str, type[NominalModel]] = {
    GaussianNominal.kind: GaussianNominal,
    EnergyNoiseNominal.kind: EnergyNoiseNominal,
    EnergySignalNominal.kind: EnergySignalNominal,
}


def create_nominal(kind: str, params: dict[str, Any]) -> NominalModel:
    """Instantiate the nominal model registered under ``kind``.

    Args:
        kind: One of "gaussian", "exp_h0", "exp_h1"
        params: Keyword parameters of the model

    Returns:
        The nominal model
    """
    model_cls = _MODELS.get(kind)
    if model_cls is None:
        msg = f"Unknown nominal kind: {kind}"
        raise InvalidParameterError(msg)
    try:
        return model_cls(**{key: float(value) for key, value in params.items()})
    except (TypeError, ValueError) as exc:
        msg = f"Bad parameters for nominal '{kind}': {exc}"
        raise InvalidParameterError(msg) from exc
