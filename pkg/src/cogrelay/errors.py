"""Exception types shared across the package."""


class CogrelayError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(CogrelayError, ValueError):
    """A numeric argument is outside its valid range."""


class ConsistencyError(CogrelayError, ValueError):
    """A derived or user-supplied table violates a structural invariant."""


class InfeasibleRateError(CogrelayError, ValueError):
    """A flow is offered to a queue that can never serve it."""


class ConfigError(CogrelayError, ValueError):
    """A scenario file or run configuration is malformed."""
