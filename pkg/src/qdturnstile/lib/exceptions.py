"""Exceptions for qdturnstile."""


class TurnstileError(Exception):
    """Base class for every error raised by qdturnstile."""

    pass


class DomainError(TurnstileError, ValueError):
    """Raised when an input lies outside the domain of an operation."""

    pass


class DegenerateModeError(DomainError):
    """Raised when a cavity polarization mode does not decay (theta = pi/2)."""

    pass


class SingularGeneratorError(TurnstileError, ArithmeticError):
    """Raised when the transient part of a rate generator cannot be inverted."""

    pass


class StalledTrajectoryError(TurnstileError, RuntimeError):
    """Raised when a trajectory sits in a non-absorbing level with zero total rate."""

    pass


class ConfigError(TurnstileError, ValueError):
    """Raised when a run configuration file cannot be parsed or validated."""

    pass
