"""Exception hierarchy.

Every error raised by this package derives from :class:`KappaCovError`,
so callers can catch one type at an API boundary.  The subclasses map
one-to-one onto distinct failure conditions and are what the command
line interface prints as machine-readable error codes.
"""

from __future__ import annotations

__all__ = [
    "KappaCovError",
    "SampleIOError",
    "ParseError",
    "TooFewRows",
    "InvalidSample",
    "SampleTooSmall",
    "DegenerateMarginal",
    "DomainError",
    "UnsupportedFamily",
    "NonMonotoneQuantile",
    "AllValuesEqual",
    "DegenerateGrid",
    "EmptySpectrum",
    "ThetaOutOfRange",
    "NOnPositive",
    "UnknownEstimator",
]


class KappaCovError(Exception):
    """Base class for all package errors."""


class SampleIOError(KappaCovError):
    """A sample file could not be read or written."""


class ParseError(KappaCovError):
    """A sample file row could not be parsed.

    The offending data row (1-based, header excluded) is available as
    the ``row`` attribute.
    """

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


class TooFewRows(KappaCovError):
    """A sample file held fewer than two data rows."""


class InvalidSample(KappaCovError, ValueError):
    """Directly constructed sample arrays violate a container invariant."""


class SampleTooSmall(KappaCovError):
    """The requested statistic needs more observations than supplied."""


class DegenerateMarginal(KappaCovError):
    """A marginal is constant, so a normalized coefficient is undefined."""


class DomainError(KappaCovError, ValueError):
    """A numeric argument lies outside the mathematical domain."""


class UnsupportedFamily(KappaCovError, ValueError):
    """The named bivariate family is not one this package provides."""


class NonMonotoneQuantile(KappaCovError):
    """A quantile function produced non-increasing grid points."""


class AllValuesEqual(KappaCovError):
    """An empirical marginal collapsed to a single support point."""


class DegenerateGrid(KappaCovError):
    """Discretization points are not strictly increasing."""


class EmptySpectrum(KappaCovError):
    """No eigenvalue survives after removing the constant mode."""


class ThetaOutOfRange(KappaCovError, ValueError):
    """The dependence parameter lies outside the family's legal range."""


class NOnPositive(KappaCovError, ValueError):
    """A sample size argument must be a positive integer."""


class UnknownEstimator(KappaCovError, ValueError):
    """The estimator name is not one of star, tilde, hat."""
