"""Exception hierarchy shared by every hamkit module."""


class HamkitError(Exception):
    """Base class for all hamkit errors."""


class DomainError(HamkitError, ValueError):
    """An argument lies outside the set where a map is defined."""

    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class EvaluationError(HamkitError, ArithmeticError):
    """A function produced a non-finite value."""

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class DegenerateKernelError(HamkitError):
    """A kernel integral needed as a denominator is not strictly positive."""


class ConfigError(HamkitError):
    """A problem configuration is malformed or inconsistent."""
