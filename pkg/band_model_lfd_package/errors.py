"""Exception hierarchy for band model computations."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from band_model_lfd_package.data_models import LfdSolution


class BandModelError(Exception):
    """Base exception for all band model related errors."""


class InvalidParameterError(BandModelError, ValueError):
    """Raised when an argument lies outside its admissible range."""


class LengthMismatchError(BandModelError, ValueError):
    """Raised when an array does not match the length of its grid."""


class GridMismatchError(BandModelError, ValueError):
    """Raised when two objects that must share a grid do not."""


class BandValidationError(BandModelError):
    """Base exception for malformed density bands."""


class OrderingViolationError(BandValidationError):
    """Raised when a lower envelope exceeds its upper envelope somewhere."""


class LowerMassExceedsOneError(BandValidationError):
    """Raised when the lower envelope carries more than unit mass."""


class UpperMassBelowOneError(BandValidationError):
    """Raised when the upper envelope carries less than unit mass."""


class SolverError(BandModelError):
    """Base exception for failures of the least favorable density solver."""


class NoRootError(SolverError):
    """Raised when the clip constant cannot be bracketed below the ceiling."""


class ProjectionInfeasibleError(SolverError):
    """Raised when a reference function cannot be projected onto a band."""


class InfeasibleBandsError(SolverError):
    """Raised when a pair of bands admits no feasible starting point."""


class MaxIterationsExceededError(SolverError):
    """Raised when the fixed-point iteration hits its iteration cap.

    The last iterate is kept on the exception so callers can inspect it.
    """

    def __init__(self, msg: str, partial: LfdSolution) -> None:
        """Initialize with a message and the last (unconverged) iterate.

        Args:
            msg: Human readable description
            partial: Diagnostics of the last iterate
        """
        super().__init__(msg)
        self.partial = partial


class SpecParseError(BandModelError):
    """Raised when a band spec document cannot be parsed."""
