"""Truncations of integer coefficient series and Dwork congruences

    T_{s+1}(z) T_{s-1}(z^p) == T_s(z) T_s(z^p)   (mod p^s),

where T_s is the series truncated below degree p^s. Everything here is
exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from numbers import Integral
from pathlib import Path
from typing import Callable

from sympy import isprime

from .algebra import Polynomial
from .errors import DomainError

__all__ = [
    "CoefficientSeries",
    "TruncationPolynomial",
    "central_binomial",
    "factorial_control",
    "series_from_file",
    "series_from_list",
    "truncation_poly",
    "dwork_congruence_residual",
    "congruence_holds",
    "padic_valuation",
]


def _require_prime(p) -> None:
    if not isinstance(p, Integral) or isinstance(p, bool) or not isprime(int(p)):
        raise DomainError(f"{p!r} is not a prime")


@dataclass(frozen=True)
class CoefficientSeries:
    """Exact coefficient generator d -> c_d with c_0 = 1.

    The generator may return Fractions; they must already be integral
    (a generator with genuine denominators has to clear them itself).
    """

    generator: Callable[[int], int]
    name: str = "series"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.coefficient(0) != 1:
            raise DomainError(f"series {self.name!r} must have c_0 = 1, got {self.coefficient(0)}")

    def coefficient(self, d: int) -> int:
        if d in self._cache:
            return self._cache[d]
        c = self.generator(d)
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise DomainError(f"c_{d} = {c} of {self.name!r} is not an integer")
            c = c.numerator
        if not isinstance(c, Integral) or isinstance(c, bool):
            raise DomainError(f"c_{d} = {c!r} of {self.name!r} is not an exact integer")
        c = int(c)
        self._cache[d] = c
        return c

    def coefficients(self, count: int) -> list:
        return [self.coefficient(d) for d in range(count)]


@dataclass(frozen=True)
class TruncationPolynomial:
    prime: int
    level: int
    poly: Polynomial


def central_binomial() -> CoefficientSeries:
    return CoefficientSeries(lambda d: math.comb(2 * d, d), "central_binomial")


@lru_cache(maxsize=None)
def _factorial(d: int) -> int:
    return math.factorial(d)


def factorial_control() -> CoefficientSeries:
    """c_0 = 1, c_d = d! + 1 for d >= 1; not Dwork-congruent."""
    return CoefficientSeries(lambda d: 1 if d == 0 else _factorial(d) + 1, "factorial_control")


def series_from_list(values, name: str = "list") -> CoefficientSeries:
    values = [int(v) for v in values]

    def gen(d):
        if d >= len(values):
            raise DomainError(f"series {name!r} only has {len(values)} coefficients, c_{d} requested")
        return values[d]

    return CoefficientSeries(gen, name)


def series_from_file(path) -> CoefficientSeries:
    """Newline-separated decimal integers, c_0 first. Blank lines are ignored."""
    path = Path(path)
    values = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        text = line.strip()
        if not text:
            continue
        try:
            values.append(int(text))
        except ValueError:
            raise DomainError(f"{path}:{lineno}: not an integer: {text!r}") from None
    return series_from_list(values, name=str(path))


def truncation_poly(series: CoefficientSeries, prime: int, s: int) -> TruncationPolynomial:
    """sum_{d < p^s} c_d z^d."""
    _require_prime(prime)
    if s < 0:
        raise DomainError("level s must be nonnegative")
    return TruncationPolynomial(prime, s, Polynomial(tuple(series.coefficients(prime ** s))))


def dwork_congruence_residual(series: CoefficientSeries, prime: int, s: int) -> Polynomial:
    """(T_{s+1}(z) T_{s-1}(z^p) - T_s(z) T_s(z^p)) mod p^s, degrees < p^(s+1)."""
    if s < 1:
        raise DomainError("congruence level s must be >= 1")
    p = prime
    t_next = truncation_poly(series, p, s + 1).poly
    t_cur = truncation_poly(series, p, s).poly
    t_prev = truncation_poly(series, p, s - 1).poly
    bound = p ** (s + 1)
    lhs = (t_next * t_prev.substitute_power(p)).truncate(bound)
    rhs = (t_cur * t_cur.substitute_power(p)).truncate(bound)
    return (lhs - rhs).reduce_mod(p ** s)


def congruence_holds(series: CoefficientSeries, prime: int, s: int) -> bool:
    return dwork_congruence_residual(series, prime, s).is_zero()


def padic_valuation(n: int, prime: int) -> float | int:
    """Exponent of ``prime`` in ``n``; ``math.inf`` for n = 0."""
    _require_prime(prime)
    n = int(n)
    if n == 0:
        return math.inf
    n = abs(n)
    e = 0
    while n % prime == 0:
        n //= prime
        e += 1
    return e
