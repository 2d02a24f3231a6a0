"""Exception hierarchy shared by every satoseries module."""

from __future__ import annotations


class SatoSeriesError(Exception):
    """Base class for all library errors."""


class InvalidTruncation(SatoSeriesError, ValueError):
    """Requested truncation order does not exceed the series valuation."""


class LatticeError(SatoSeriesError, ValueError):
    """An exponent left the (1/24)Z lattice."""


class UnsupportedWeight(SatoSeriesError, ValueError):
    """Eisenstein weight outside {2, 4, 6}."""


class InsufficientPrecision(SatoSeriesError):
    """Truncation order or working precision below what a check needs."""


class PrecisionError(SatoSeriesError):
    """Two evaluations at different precisions disagree."""


class DomainError(SatoSeriesError, ValueError):
    """Argument outside the domain of the function being evaluated."""


class OutOfDisc(DomainError):
    """Hypergeometric argument with |z| >= 1."""


class SingularityError(SatoSeriesError):
    """Implicit differentiation at a singular point of the curve."""


class ExpressionSyntaxError(SatoSeriesError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class CatalogError(SatoSeriesError, LookupError):
    """Unknown catalog entry or malformed catalog file."""
