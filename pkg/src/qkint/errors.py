"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class QKIntError(Exception):
    """Base class for every error raised by the toolkit."""


class DomainError(QKIntError, ValueError):
    """Input outside the domain of an operation."""


class SingularityError(QKIntError, ZeroDivisionError):
    """A denominator, pole or resonance was hit.

    ``where`` names the offending quantity so callers (and reports) can
    point at it without parsing the message.
    """

    def __init__(self, message: str, where: str | None = None):
        super().__init__(message)
        self.where = where


class ConvergenceError(QKIntError, ArithmeticError):
    """An iterative solve did not reach its tolerance."""

    def __init__(self, message: str, last_iterate=None, residual_norm: float = float("nan"),
                 parameter=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual_norm = residual_norm
        self.parameter = parameter


class PathSingularityError(SingularityError):
    """A continuation path passed through a singular parameter value."""

    def __init__(self, message: str, parameter=None, where: str | None = None):
        super().__init__(message, where=where)
        self.parameter = parameter


class CollisionError(QKIntError, ArithmeticError):
    """Two tracked roots came closer than the collision threshold."""

    def __init__(self, message: str, parameter=None, roots=None):
        super().__init__(message)
        self.parameter = parameter
        self.roots = roots
