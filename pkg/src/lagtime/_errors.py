"""Exception types shared across the package."""


class LagtimeError(Exception):
    """Base class for all package errors."""


class DomainError(LagtimeError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NumericError(LagtimeError, ArithmeticError):
    """A computation failed to converge or exceeded its accuracy budget."""


class UsageError(LagtimeError, ValueError):
    """Inconsistent or malformed arguments (length mismatch, empty input...)."""
