"""Exception hierarchy shared by every becsim module."""


class BecError(Exception):
    """Base class for all becsim errors."""


class DomainError(BecError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigurationError(BecError, ValueError):
    """A verification or run configuration is unusable as given."""


class QuadratureError(BecError, ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate, error_estimate):
        super().__init__(f"{message} (estimate={estimate!r}, error={error_estimate!r})")
        self.estimate = estimate
        self.error_estimate = error_estimate


class RunawayError(BecError, RuntimeError):
    """A rejection loop exceeded its proposal cap for a single draw."""
