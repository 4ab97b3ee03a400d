"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(RuntimeError):
    """A numerical routine did not reach its requested accuracy."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class InfeasibleError(ValueError):
    """A requested operating point cannot be reached."""


class ConfigError(ValueError):
    """A run configuration is malformed or has an invalid field."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
