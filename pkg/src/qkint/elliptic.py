"""Elliptic RS coefficients from truncated theta products, and the
compact-limit ADHM Bethe equations with their universal-bundle eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .algebra import NonlinearSystem, SolverConfig, linear_path, track_path
from .errors import CollisionError, DomainError, SingularityError

__all__ = [
    "ThetaParams",
    "ERSCoefficientRequest",
    "ADHMBetheProblem",
    "theta_trunc",
    "theta_log_derivative_p",
    "ers_hamiltonian_coefficient",
    "ers_coefficient_derivative",
    "ers_hamiltonians",
    "string_seed",
    "adhm_residual",
    "adhm_uncleared_residual",
    "adhm_bethe_solve",
    "adhm_bethe_track",
    "universal_bundle_eigenvalue",
]

COLLISION_EPS = 1e-10


@dataclass(frozen=True)
class ThetaParams:
    p_ell: complex
    truncation: int = 16

    def __post_init__(self):
        if not abs(self.p_ell) < 1:
            raise DomainError(f"|p| must be < 1, got {abs(self.p_ell)}")
        if self.truncation < 1:
            raise DomainError("truncation must be positive")

    def truncation_error_bound(self) -> float:
        return abs(self.p_ell) ** (self.truncation + 1)


def theta_trunc(x: complex, params: ThetaParams) -> complex:
    """prod_{m=0..M}(1 - p^m x) * prod_{m=1..M}(1 - p^m / x)."""
    if x == 0:
        raise DomainError("theta_trunc undefined at x = 0")
    p = params.p_ell
    out = 1 - x
    pm = 1
    for _ in range(params.truncation):
        pm = pm * p
        out *= (1 - pm * x) * (1 - pm / x)
    return out


def theta_log_derivative_p(x: complex, params: ThetaParams) -> complex:
    """d/dp log theta_trunc(x | p)."""
    p = params.p_ell
    total = 0
    for m in range(1, params.truncation + 1):
        dpm = m * p ** (m - 1)
        pm = p ** m
        total += -dpm * x / (1 - pm * x) - dpm / x / (1 - pm / x)
    return total


@dataclass(frozen=True)
class ERSCoefficientRequest:
    subset: tuple
    x: tuple
    hbar: complex
    theta: ThetaParams

    def __post_init__(self):
        x = tuple(complex(v) for v in self.x)
        object.__setattr__(self, "x", x)
        subset = tuple(sorted(set(self.subset)))
        object.__setattr__(self, "subset", subset)
        n = len(x)
        if any(not 0 <= i < n for i in subset):
            raise DomainError(f"subset {subset} not inside range({n})")
        if any(v == 0 for v in x):
            raise DomainError("coordinates must be nonzero")
        for i in range(n):
            for j in range(i + 1, n):
                if x[i] == x[j]:
                    raise DomainError(f"x[{i}] == x[{j}]")

    def pairs(self):
        inside = set(self.subset)
        outside = [j for j in range(len(self.x)) if j not in inside]
        return [(i, j) for i in self.subset for j in outside]


def ers_hamiltonian_coefficient(req: ERSCoefficientRequest) -> complex:
    """prod_{i in I, j not in I} theta(hbar x_i/x_j) / theta(x_i/x_j)."""
    out = 1
    for i, j in req.pairs():
        ratio = req.x[i] / req.x[j]
        den = theta_trunc(ratio, req.theta)
        if abs(den) <= 1e-14 * max(1.0, abs(ratio)):
            raise SingularityError(f"theta(x[{i}]/x[{j}]) vanishes", where=f"x[{i}],x[{j}]")
        out *= theta_trunc(req.hbar * ratio, req.theta) / den
    return out


def ers_coefficient_derivative(req: ERSCoefficientRequest) -> complex:
    """d/dp of :func:`ers_hamiltonian_coefficient` (analytic, log-derivative)."""
    dlog = 0
    for i, j in req.pairs():
        ratio = req.x[i] / req.x[j]
        dlog += theta_log_derivative_p(req.hbar * ratio, req.theta) - theta_log_derivative_p(ratio, req.theta)
    return ers_hamiltonian_coefficient(req) * dlog


def ers_hamiltonians(x: Sequence, p: Sequence, hbar: complex, theta: ThetaParams) -> tuple:
    """H_r = sum_{|I|=r} coefficient(I) * prod_{i in I} p_i, r = 1..n."""
    n = len(x)
    out = []
    for r in range(1, n + 1):
        total = 0
        for subset in combinations(range(n), r):
            term = ers_hamiltonian_coefficient(ERSCoefficientRequest(subset, tuple(x), hbar, theta))
            for m in subset:
                term *= p[m]
            total += term
        out.append(total)
    return tuple(out)


# --------------------------------------------------------------------------
# ADHM compact limit
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ADHMBetheProblem:
    a_params: tuple
    k: int
    q: complex
    coupling: complex

    def __post_init__(self):
        a = tuple(complex(v) for v in self.a_params)
        object.__setattr__(self, "a_params", a)
        if self.k < 1:
            raise DomainError("k must be positive")
        if not a or any(v == 0 for v in a):
            raise DomainError("a_params must be nonempty and nonzero")
        if len(set(a)) != len(a):
            raise DomainError("a_params must be pairwise distinct")
        if self.q == 0:
            raise DomainError("q must be nonzero")
        for m in range(1, 25):
            if abs(self.q ** m - 1) <= 1e-12:
                raise DomainError(f"q is a root of unity of order {m}")

    @property
    def N(self) -> int:
        return len(self.a_params)


def string_seed(prob: ADHMBetheProblem, composition: Sequence[int]) -> np.ndarray:
    """Roots a_l, q a_l, ..., q^(k_l - 1) a_l for each string length k_l."""
    composition = list(composition)
    if len(composition) != prob.N or any(c < 0 for c in composition) or sum(composition) != prob.k:
        raise DomainError(
            f"composition {composition} must have {prob.N} nonnegative parts summing to {prob.k}"
        )
    roots = []
    for a, length in zip(prob.a_params, composition):
        roots.extend(a * prob.q ** j for j in range(length))
    return np.array(roots, dtype=complex)


def adhm_residual(roots: Sequence, a_params: Sequence, q: complex, coupling: complex) -> np.ndarray:
    """Bethe equations with denominators cleared::

        prod_l (s_a - a_l) prod_{b!=a} (s_a - q s_b) - coupling prod_{b!=a} (s_a - s_b/q)

    At coupling 0 the q-strings sit on zeros of both sides of the
    uncleared form, so the cleared form is the one Newton works with.
    """
    s = np.asarray(roots, dtype=complex)
    k = s.size
    out = np.empty(k, dtype=complex)
    for a in range(k):
        lhs = np.prod([s[a] - al for al in a_params])
        den = 1
        for b in range(k):
            if b != a:
                lhs = lhs * (s[a] - q * s[b])
                den = den * (s[a] - s[b] / q)
        out[a] = lhs - coupling * den
    return out


def adhm_uncleared_residual(roots: Sequence, a_params: Sequence, q: complex, coupling: complex) -> np.ndarray:
    s = np.asarray(roots, dtype=complex)
    out = []
    for a in range(s.size):
        val = np.prod([s[a] - al for al in a_params])
        for b in range(s.size):
            if b != a:
                val *= (s[a] - q * s[b]) / (s[a] - s[b] / q)
        out.append(val - coupling)
    return np.array(out)


def _collision_guard(t, roots):
    for a in range(roots.size):
        for b in range(a + 1, roots.size):
            if abs(roots[a] - roots[b]) < COLLISION_EPS:
                raise CollisionError(f"roots {a} and {b} collide at coupling {t}", t, roots)


def adhm_bethe_track(
    prob: ADHMBetheProblem,
    partition_seed: Sequence[int],
    config: SolverConfig = SolverConfig(),
) -> tuple:
    """Track the q-string seed from coupling 0 to ``prob.coupling``.

    Returns ``(path, roots_along_path)``.
    """
    seed = string_seed(prob, partition_seed)
    a, q = prob.a_params, prob.q
    path = linear_path(0.0, prob.coupling, config.step_count)

    def family(c):
        return NonlinearSystem(prob.k, lambda s: adhm_residual(s, a, q, c), parameter=c)

    roots = track_path(family, seed, path, config, check=_collision_guard)
    return path, roots


def adhm_bethe_solve(
    prob: ADHMBetheProblem,
    partition_seed: Sequence[int],
    config: SolverConfig = SolverConfig(),
) -> np.ndarray:
    return adhm_bethe_track(prob, partition_seed, config)[1][-1]


def universal_bundle_eigenvalue(roots: Sequence, q: complex, hbar: complex | None = None) -> complex:
    """1 - (1 - 1/hbar)(1 - q) sum(s), or 1 - (1 - q) sum(s) without hbar."""
    total = sum(complex(s) for s in roots)
    factor = 1 - q
    if hbar is not None:
        factor = (1 - 1 / hbar) * factor
    return 1 - factor * total
