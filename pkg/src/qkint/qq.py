"""SL(2) QQ-systems

    xi~ Q-(u) Q+(hbar u) - xi Q-(hbar u) Q+(u) = c Lambda(u)

with monic Q+ (degree k), monic Q- (degree N - k) and a scalar c that
absorbs the normalisation. Bethe equations enter only through
:func:`bethe_residual`, obtained by evaluating the relation at u = s and
u = s/hbar for a root s of Q+.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .algebra import (
    NonlinearSystem,
    Polynomial,
    SolverConfig,
    dedup_roots,
    newton_solve,
)
from .errors import ConvergenceError, DomainError, SingularityError

__all__ = [
    "DrinfeldData",
    "QQSolution",
    "OrbifoldedQ",
    "DegenerateTwistError",
    "qq_residual",
    "solve_qq",
    "qq_solutions",
    "bethe_residual",
    "backlund_swap",
    "orbifolded_qplus",
    "closed_form_n1",
]

RESONANCE_TOL = 1e-10


class DegenerateTwistError(DomainError):
    """xi / xi~ is a small power of hbar (including xi = xi~)."""


def _power_ratio(ratio: complex, hbar: complex, max_power: int):
    for m in range(-max_power, max_power + 1):
        if abs(ratio - hbar ** m) <= RESONANCE_TOL * max(1.0, abs(hbar ** m)):
            return m
    return None


@dataclass(frozen=True)
class DrinfeldData:
    lambda_roots: tuple
    hbar: complex
    magnon_count: int

    def __post_init__(self):
        roots = tuple(complex(a) for a in self.lambda_roots)
        object.__setattr__(self, "lambda_roots", roots)
        N = len(roots)
        if not 0 <= self.magnon_count <= N:
            raise DomainError(f"magnon count {self.magnon_count} outside 0..{N}")
        if any(a == 0 for a in roots):
            raise DomainError("Drinfeld roots must be nonzero")
        for i in range(N):
            for j in range(N):
                if i != j:
                    m = _power_ratio(roots[i] / roots[j], self.hbar, max(N, 1))
                    if m is not None:
                        raise DomainError(
                            f"a[{i}]/a[{j}] = hbar^{m}: degenerate Drinfeld data"
                        )

    @property
    def N(self) -> int:
        return len(self.lambda_roots)

    @property
    def lam(self) -> Polynomial:
        return Polynomial.from_roots(self.lambda_roots)


@dataclass(frozen=True)
class QQSolution:
    q_plus: Polynomial
    q_minus: Polynomial
    xi: complex
    xi_tilde: complex
    normalization: complex

    def bethe_roots(self) -> np.ndarray:
        return self.q_plus.roots()


def check_twist(xi: complex, xi_tilde: complex, hbar: complex, max_power: int) -> None:
    if xi == 0 or xi_tilde == 0:
        raise DegenerateTwistError("twist entries must be nonzero")
    m = _power_ratio(xi / xi_tilde, hbar, max_power)
    if m is not None:
        raise DegenerateTwistError(f"xi/xi~ = hbar^{m}")


def qq_residual(sol: QQSolution, data: DrinfeldData) -> Polynomial:
    if sol.q_plus.degree + sol.q_minus.degree != data.N:
        raise DomainError(
            f"deg Q+ + deg Q- = {sol.q_plus.degree + sol.q_minus.degree}, expected N = {data.N}"
        )
    h = data.hbar
    qp, qm = sol.q_plus, sol.q_minus
    return (
        sol.xi_tilde * qm * qp.scale_argument(h)
        - sol.xi * qm.scale_argument(h) * qp
        - sol.normalization * data.lam
    )


def closed_form_n1(a: complex, hbar: complex, xi: complex, xi_tilde: complex) -> complex:
    """Bethe root of the N = 1, k = 1 system."""
    return a * (xi_tilde * hbar - xi) / (xi_tilde - xi)


def _residual_vector(x: np.ndarray, k: int, N: int, h, xi, xit, lam: np.ndarray) -> np.ndarray:
    # coefficient arrays lowest degree first
    qp = np.concatenate([x[:k], [1.0]])
    qm = np.concatenate([x[k:N], [1.0]])
    c = x[N]
    qp_h = qp * h ** np.arange(k + 1)
    qm_h = qm * h ** np.arange(N - k + 1)
    lhs = xit * np.convolve(qm, qp_h) - xi * np.convolve(qm_h, qp)
    return lhs - c * lam


def _linear_seed(qp: np.ndarray, k: int, N: int, h, xi, xit, lam: np.ndarray) -> np.ndarray:
    """Given Q+ coefficients, least-squares Q- lower coefficients and c."""
    cols = []
    for d in range(N - k):
        e = np.zeros(N - k + 1, dtype=complex)
        e[d] = 1.0
        cols.append(xit * np.convolve(e, qp * h ** np.arange(k + 1)) - xi * h ** d * np.convolve(e, qp))
    cols.append(-lam)
    A = np.array(cols).T
    e = np.zeros(N - k + 1, dtype=complex)
    e[N - k] = 1.0
    b = -(xit * np.convolve(e, qp * h ** np.arange(k + 1)) - xi * h ** (N - k) * np.convolve(e, qp))
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    return sol


def solve_qq(
    data: DrinfeldData,
    twist: tuple,
    seed: Sequence = (),
    config: SolverConfig = SolverConfig(),
) -> QQSolution:
    """Newton solve for (Q+, Q-, c) starting from Bethe-root guesses ``seed``."""
    xi, xit = twist
    N, k, h = data.N, data.magnon_count, data.hbar
    check_twist(xi, xit, h, max(N, 1))
    seed = np.asarray(seed, dtype=complex).ravel()
    if seed.size != k:
        raise DomainError(f"seed must have {k} entries")
    lam = np.array(data.lam.coefficients, dtype=complex)
    qp0 = np.array(Polynomial.from_roots(seed).coefficients, dtype=complex) if k else np.ones(1, complex)
    x0 = np.concatenate([qp0[:k], _linear_seed(qp0, k, N, h, xi, xit, lam)])
    system = NonlinearSystem(
        arity=N + 1, residual=lambda x: _residual_vector(x, k, N, h, xi, xit, lam)
    )
    x = newton_solve(system, x0, config)
    sol = QQSolution(
        q_plus=Polynomial(tuple(x[:k]) + (1.0,)),
        q_minus=Polynomial(tuple(x[k:N]) + (1.0,)),
        xi=xi,
        xi_tilde=xit,
        normalization=complex(x[N]),
    )
    return sol


def qq_solutions(
    data: DrinfeldData,
    twist: tuple,
    n_starts: int = 200,
    rng: np.random.Generator | None = None,
    config: SolverConfig = SolverConfig(),
    threshold: float = 1e-8,
) -> list:
    """Distinct solutions found by multi-start Newton from random seeds."""
    rng = np.random.default_rng() if rng is None else rng
    k = data.magnon_count
    scale = max(1.0, max((abs(a) for a in data.lambda_roots), default=1.0))
    found = []
    for _ in range(n_starts):
        seed = scale * (rng.normal(size=k) + 1j * rng.normal(size=k))
        try:
            found.append(solve_qq(data, twist, seed, config))
        except ConvergenceError:
            continue
    keys = dedup_roots([np.array(s.q_plus.coefficients, dtype=complex) for s in found], threshold)
    out = []
    for key in keys:
        for s in found:
            if np.max(np.abs(np.array(s.q_plus.coefficients, dtype=complex) - key)) <= threshold:
                out.append(s)
                break
    return out


def bethe_residual(s_roots: Sequence, data: DrinfeldData, twist: tuple) -> np.ndarray:
    """-(xi~/xi) Q+(hbar s)/Q+(s/hbar) - Lambda(s)/Lambda(s/hbar) at each root s."""
    xi, xit = twist
    h = data.hbar
    roots = [complex(s) for s in s_roots]
    qp = Polynomial.from_roots(roots)
    lam = data.lam
    out = []
    for a, s in enumerate(roots):
        q_den = qp(s / h)
        l_den = lam(s / h)
        if abs(q_den) < 1e-300 or abs(l_den) < 1e-300:
            raise SingularityError(f"pole at root {a}: s/hbar is a zero of Q+ or Lambda", where=f"s[{a}]")
        out.append(-(xit / xi) * qp(h * s) / q_den - lam(s) / l_den)
    return np.array(out, dtype=complex)


def backlund_swap(sol: QQSolution) -> QQSolution:
    """Exchange Q+ <-> Q- and xi <-> xi~; the relation flips sign, so c -> -c."""
    if sol.xi == sol.xi_tilde:
        raise DegenerateTwistError("xi = xi~ is fixed by the Weyl reflection")
    return replace(
        sol,
        q_plus=sol.q_minus,
        q_minus=sol.q_plus,
        xi=sol.xi_tilde,
        xi_tilde=sol.xi,
        normalization=-sol.normalization,
    )


@dataclass(frozen=True)
class OrbifoldedQ:
    """Q+(z) = prod_i (z - s_i)(q/z - s_i), invariant under z -> q/z."""

    roots: tuple
    q: complex

    def __call__(self, z):
        out = 1
        for s in self.roots:
            out = out * (z - s) * (self.q / z - s)
        return out

    def symmetry_residual(self, z) -> float:
        return abs(self(self.q / z) - self(z))

    def cleared_polynomial(self) -> Polynomial:
        """z^k Q+(z) = prod_i (z - s_i)(q - s_i z)."""
        poly = Polynomial((1,))
        for s in self.roots:
            poly = poly * Polynomial((-s, 1)) * Polynomial((self.q, -s))
        return poly


def orbifolded_qplus(roots: Sequence, q: complex) -> OrbifoldedQ:
    if q == 0:
        raise DomainError("q must be nonzero")
    if any(s == 0 for s in roots):
        raise DomainError("orbifolded roots must be nonzero")
    return OrbifoldedQ(tuple(roots), q)
