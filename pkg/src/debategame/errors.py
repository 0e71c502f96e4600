"""Exception hierarchy shared by every module."""


class DebateGameError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DebateGameError, ValueError):
    """Invalid game instance. ``path`` locates the offending field."""

    def __init__(self, message, path=""):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


class NumericError(DebateGameError, ArithmeticError):
    """A quadrature, root-finding or evaluation step failed."""


class QuadratureError(NumericError):
    def __init__(self, message, achieved=None):
        self.achieved = achieved
        super().__init__(message)


class CSFEvaluationError(NumericError):
    def __init__(self, q_C, q_I, value):
        self.point = (q_C, q_I)
        super().__init__(f"theta({q_C!r}, {q_I!r}) = {value!r} is not finite")


class DegeneratePriorError(NumericError):
    """Posterior conditioning impossible (win mass is 0 or 1, or a one-point belief)."""


class ResolutionError(NumericError):
    """Type grid too coarse to certify a best-response set."""


class DomainError(DebateGameError, ValueError):
    """Argument outside the model's domain (e.g. a negative quality)."""


class InvariantError(NumericError):
    """A computed quantity violates a structural property it must satisfy."""
