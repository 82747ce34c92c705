"""Polynomials, symmetric functions, characteristic polynomials and the
Newton / homotopy solvers used by the rest of the package."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Rational
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "Polynomial",
    "NonlinearSystem",
    "SolverConfig",
    "elementary_symmetric",
    "elementary_symmetric_all",
    "characteristic_coefficients",
    "faddeev_leverrier",
    "newton_solve",
    "homotopy_continue",
    "track_path",
    "linear_path",
    "dedup_roots",
    "max_norm",
]

FD_STEP = 1e-7
DEDUP_THRESHOLD = 1e-8


def _is_exact(x) -> bool:
    return isinstance(x, (Integral, Rational)) and not isinstance(x, bool)


# --------------------------------------------------------------------------
# Polynomials
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """Univariate polynomial, coefficients lowest degree first.

    Coefficients may be Python ints, Fractions or complex numbers; arithmetic
    keeps exact coefficients exact. Trailing zeros are stripped on
    construction, so the zero polynomial has ``coefficients == ()`` and
    degree -1.
    """

    coefficients: tuple = ()

    def __post_init__(self):
        coeffs = list(self.coefficients)
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    @classmethod
    def from_roots(cls, roots: Iterable, leading=1) -> "Polynomial":
        poly = cls((leading,))
        for r in roots:
            poly = poly * cls((-r, 1))
        return poly

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "Polynomial":
        return cls((0,) * degree + (coeff,))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self):
        return self.coefficients[-1] if self.coefficients else 0

    def is_zero(self) -> bool:
        return not self.coefficients

    def is_monic(self) -> bool:
        return self.leading == 1

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, d: int):
        return self.coefficients[d] if 0 <= d < len(self.coefficients) else 0

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self), len(other))
        return Polynomial(tuple(self[d] + other[d] for d in range(n)))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(tuple(-c for c in self.coefficients))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Polynomial()
        out = [0] * (len(self) + len(other) - 1)
        for i, a in enumerate(self.coefficients):
            if a == 0:
                continue
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def scale_argument(self, c) -> "Polynomial":
        """Return the polynomial u -> self(c*u)."""
        out, power = [], 1
        for coeff in self.coefficients:
            out.append(coeff * power)
            power = power * c
        return Polynomial(tuple(out))

    def substitute_power(self, p: int) -> "Polynomial":
        """Return the polynomial z -> self(z**p)."""
        if p < 1:
            raise DomainError(f"power must be positive, got {p}")
        out = [0] * (p * self.degree + 1) if self.coefficients else []
        for d, c in enumerate(self.coefficients):
            out[p * d] = c
        return Polynomial(tuple(out))

    def truncate(self, n: int) -> "Polynomial":
        """Keep the terms of degree < n."""
        return Polynomial(self.coefficients[:n])

    def reduce_mod(self, modulus: int) -> "Polynomial":
        """Reduce integer coefficients into [0, modulus)."""
        for c in self.coefficients:
            if not isinstance(c, Integral):
                raise DomainError("reduce_mod needs integer coefficients")
        return Polynomial(tuple(int(c) % modulus for c in self.coefficients))

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coefficients), default=0.0)

    def roots(self) -> np.ndarray:
        if self.degree < 1:
            return np.zeros(0, dtype=complex)
        return np.roots(np.array(self.coefficients[::-1], dtype=complex))

    def to_complex(self) -> "Polynomial":
        return Polynomial(tuple(complex(c) for c in self.coefficients))


def _as_poly(x) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial((x,))


# --------------------------------------------------------------------------
# Symmetric functions and characteristic polynomials
# --------------------------------------------------------------------------


def elementary_symmetric_all(values: Sequence) -> list:
    """All of e_0..e_n of ``values``, via the product (1 + v t)."""
    e = [1] + [0] * len(values)
    for count, v in enumerate(values, start=1):
        for k in range(count, 0, -1):
            e[k] = e[k] + v * e[k - 1]
    return e


def elementary_symmetric(values: Sequence, k: int):
    """e_k(values): the sum over k-subsets of the product of their members."""
    values = list(values)
    if k < 0 or k > len(values):
        raise DomainError(f"k={k} outside 0..{len(values)}")
    return elementary_symmetric_all(values)[k]


def _as_square(matrix):
    if isinstance(matrix, np.ndarray):
        rows = matrix.tolist()
    else:
        rows = [list(r) for r in matrix]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DomainError("matrix must be square")
    return rows


def faddeev_leverrier(matrix) -> list:
    """Characteristic coefficients (H_1..H_n) by the Faddeev–LeVerrier
    recursion. Exact for int/Fraction entries."""
    a = _as_square(matrix)
    n = len(a)
    exact = all(_is_exact(x) for r in a for x in r)
    if exact:
        a = [[Fraction(x) for x in r] for r in a]
    # c[i] is the coefficient of u^i in det(u - A)
    c = [0] * (n + 1)
    c[n] = 1
    mk = [[0] * n for _ in range(n)]
    for k in range(1, n + 1):
        prod = [[sum(a[i][t] * mk[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        for i in range(n):
            prod[i][i] += c[n - k + 1]
        mk = prod
        amk_trace = sum(sum(a[i][t] * mk[t][i] for t in range(n)) for i in range(n))
        c[n - k] = -amk_trace / k
    out = [(-1) ** k * c[n - k] for k in range(1, n + 1)]
    if exact:
        out = [int(x) if x.denominator == 1 else x for x in out]
    return out


def characteristic_coefficients(matrix) -> tuple:
    """Return (H_1, ..., H_n) with det(u - A) = sum_k (-1)^k H_k u^(n-k).

    Exact entries (int/Fraction) go through Faddeev–LeVerrier; floating
    entries through the eigenvalues, expanded into e_k.
    """
    if isinstance(matrix, np.ndarray) and matrix.dtype.kind in "fc":
        arr = matrix
    else:
        rows = _as_square(matrix)
        if all(_is_exact(x) for r in rows for x in r):
            return tuple(faddeev_leverrier(rows))
        arr = np.array(rows, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DomainError(f"matrix must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        return ()
    eig = np.linalg.eigvals(arr.astype(complex))
    e = elementary_symmetric_all(list(eig))
    return tuple(complex(x) for x in e[1:])


# --------------------------------------------------------------------------
# Solvers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    tolerance: float = 1e-12
    max_iterations: int = 100
    step_count: int = 64

    def __post_init__(self):
        if not self.tolerance > 0:
            raise DomainError("tolerance must be positive")
        if self.max_iterations < 1 or self.step_count < 1:
            raise DomainError("max_iterations and step_count must be positive")


@dataclass(frozen=True)
class NonlinearSystem:
    """F: C^n -> C^n, optionally with its exact Jacobian."""

    arity: int
    residual: Callable[[np.ndarray], Sequence[complex]]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    parameter: complex | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.arity < 1:
            raise DomainError("arity must be positive")

    def evaluate(self, x) -> np.ndarray:
        r = np.asarray(self.residual(np.asarray(x, dtype=complex)), dtype=complex).ravel()
        if r.shape != (self.arity,):
            raise DomainError(f"residual has length {r.size}, expected {self.arity}")
        return r

    def jacobian_at(self, x: np.ndarray) -> np.ndarray:
        if self.jacobian is not None:
            return np.asarray(self.jacobian(x), dtype=complex)
        # residuals are holomorphic, so a real step gives the complex derivative
        n = self.arity
        jac = np.empty((n, n), dtype=complex)
        for j in range(n):
            h = FD_STEP * max(1.0, abs(x[j]))
            xp = x.copy()
            xm = x.copy()
            xp[j] += h
            xm[j] -= h
            jac[:, j] = (self.evaluate(xp) - self.evaluate(xm)) / (2 * h)
        return jac


def max_norm(v) -> float:
    v = np.asarray(v)
    return float(np.max(np.abs(v))) if v.size else 0.0


def newton_solve(system: NonlinearSystem, start, config: SolverConfig = SolverConfig()) -> np.ndarray:
    """Newton's method with step halving; returns x with max|F(x)| <= tolerance."""
    x = np.array(start, dtype=complex).ravel()
    if x.shape != (system.arity,):
        raise DomainError(f"start has length {x.size}, expected {system.arity}")
    fx = system.evaluate(x)
    norm = max_norm(fx)
    if not np.isfinite(norm):
        raise ConvergenceError("residual not finite at start", x, norm, system.parameter)
    for _ in range(config.max_iterations):
        if norm <= config.tolerance:
            return x
        jac = system.jacobian_at(x)
        try:
            dx = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            raise ConvergenceError("singular Jacobian", x, norm, system.parameter) from None
        if not np.all(np.isfinite(dx)):
            raise ConvergenceError("non-finite Newton step", x, norm, system.parameter)
        t = 1.0
        for _ in range(12):
            x_new = x + t * dx
            f_new = system.evaluate(x_new)
            n_new = max_norm(f_new)
            if np.isfinite(n_new) and n_new < norm:
                break
            t *= 0.5
        else:
            # no decrease along the line; near the rounding floor take the full step
            x_new = x + dx
            f_new = system.evaluate(x_new)
            n_new = max_norm(f_new)
        if not np.isfinite(n_new):
            raise ConvergenceError("residual became non-finite", x, norm, system.parameter)
        x, fx, norm = x_new, f_new, n_new
    if norm <= config.tolerance:
        return x
    raise ConvergenceError(
        f"no convergence in {config.max_iterations} iterations (residual {norm:.3e})",
        x, norm, system.parameter,
    )


def linear_path(start: complex, end: complex, steps: int) -> list:
    return [start + (end - start) * i / steps for i in range(steps + 1)]


def track_path(
    family: Callable[[complex], NonlinearSystem],
    start_root,
    path: Sequence,
    config: SolverConfig = SolverConfig(),
    check: Callable[[complex, np.ndarray], None] | None = None,
) -> list:
    """Follow a root along ``path``; returns the root at every path point.

    ``check(param, root)`` runs after every step and may raise to abort.
    """
    if len(path) == 0:
        raise DomainError("empty path")
    x = np.array(start_root, dtype=complex).ravel()
    roots = []
    for t in path:
        try:
            x = newton_solve(family(t), x, config)
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"continuation failed at parameter {t}: {exc}",
                exc.last_iterate, exc.residual_norm, t,
            ) from exc
        if check is not None:
            check(t, x)
        roots.append(x.copy())
    return roots


def homotopy_continue(
    family: Callable[[complex], NonlinearSystem],
    start_root,
    path: Sequence,
    config: SolverConfig = SolverConfig(),
    check: Callable[[complex, np.ndarray], None] | None = None,
) -> np.ndarray:
    """Root of ``family(path[-1])`` reached from ``start_root`` at ``path[0]``,
    each Newton solve seeded by the previous root."""
    return track_path(family, start_root, path, config, check)[-1]


def dedup_roots(points: Iterable, threshold: float = DEDUP_THRESHOLD) -> list:
    """Greedy deduplication by max-norm distance."""
    kept: list = []
    for p in points:
        p = np.asarray(p, dtype=complex)
        if all(max_norm(p - q) > threshold for q in kept):
            kept.append(p)
    return kept


def _isclose(a, b, tol) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def isclose_seq(a: Sequence, b: Sequence, tol: float) -> bool:
    return len(a) == len(b) and all(_isclose(x, y, tol) for x, y in zip(a, b))


def is_root_of_unity(x: complex, max_order: int = 24, tol: float = 1e-12) -> bool:
    if abs(abs(x) - 1.0) > tol:
        return False
    return any(abs(x**m - 1.0) <= tol * m for m in range(1, max_order + 1))


def binomial(n: int, k: int) -> int:
    return math.comb(n, k)
