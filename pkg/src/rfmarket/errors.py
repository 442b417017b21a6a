"""Exception hierarchy shared across the package."""


class RFMarketError(Exception):
    """Base class for all package errors."""


class DomainError(RFMarketError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class EnumerationCapError(RFMarketError, OverflowError):
    """Composition enumeration would exceed the configured cap."""


class BracketError(RFMarketError, ValueError):
    """Root bracket endpoints have the same sign."""


class ConvergenceError(RFMarketError, RuntimeError):
    """An iterative solve failed to meet its tolerance."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FeasibilityError(RFMarketError):
    """A contract menu violates IR or IC."""


class MonotonicityError(FeasibilityError):
    """A solved menu is not monotone in type (rewards decrease somewhere)."""


class ConfigError(RFMarketError, ValueError):
    """Invalid scenario configuration."""
