"""Numerical and exact checks for trigonometric Ruijsenaars–Schneider systems,
XXZ spin chains, QQ-systems, elliptic RS coefficients and Dwork congruences."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CollisionError,
    ConvergenceError,
    DomainError,
    PathSingularityError,
    QKIntError,
    SingularityError,
)

__all__ = [
    "__version__",
    "QKIntError",
    "DomainError",
    "SingularityError",
    "ConvergenceError",
    "PathSingularityError",
    "CollisionError",
]
