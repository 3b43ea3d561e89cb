"""Exception types shared across the toolkit.

Everything derives from ``IndredError`` so callers can catch computational
failures with one handler while letting genuine bugs propagate.
"""

from __future__ import annotations

__all__ = [
    "IndredError",
    "InvalidMatrix",
    "DimensionError",
    "NotPositiveDefinite",
    "GroupTooSmall",
    "EmptyData",
    "ThresholdTooEarly",
    "ThresholdTooLate",
    "CensoringSupportViolated",
    "ModelMisconfigured",
    "ParseError",
    "TooFewRows",
]


class IndredError(Exception):
    """Base class for all toolkit errors."""


class InvalidMatrix(IndredError):
    """Matrix input is malformed: wrong shape, non-finite entries, or a
    basis that is not orthonormal."""


class DimensionError(IndredError):
    """A requested dimension is out of range or inconsistent."""


class NotPositiveDefinite(IndredError):
    """Matrix expected to be positive definite is not.

    Carries the offending eigenvalue in ``eigenvalue``.
    """

    def __init__(self, message: str, eigenvalue: float | None = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class GroupTooSmall(IndredError):
    """A slice or threshold group has too few observations to estimate
    the requested moments."""


class EmptyData(IndredError):
    """An operation received zero observations."""


class ThresholdTooEarly(IndredError):
    """Threshold t sits at or below the observed support: no failures by t,
    so group-1 moments are undefined."""


class ThresholdTooLate(IndredError):
    """Threshold t sits at or above all observations: group 0 is empty."""


class CensoringSupportViolated(IndredError):
    """A required censoring-survival weight is (numerically) zero.

    Carries the index of the offending observation in ``observation``.
    """

    def __init__(self, message: str, observation: int | None = None):
        super().__init__(message)
        self.observation = observation


class ModelMisconfigured(IndredError):
    """A generative model's parameters are inconsistent with its support
    requirements (e.g. pervasive rejection in a constrained sampler)."""


class ParseError(IndredError):
    """Input file is malformed. Carries ``line`` and ``column`` (1-based)."""

    def __init__(self, message: str, line: int | None = None, column: str | int | None = None):
        super().__init__(message)
        self.line = line
        self.column = column


class TooFewRows(IndredError):
    """Fewer rows than the estimators require (n must exceed p + 1)."""
