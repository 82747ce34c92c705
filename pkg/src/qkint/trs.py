"""Trigonometric Ruijsenaars–Schneider model.

Two Hamiltonian conventions live here side by side: the characteristic
polynomial of the Lax matrix (:func:`hamiltonians_charpoly`) and the
explicit subset sum (:func:`hamiltonians_subset`). They are related by
hbar -> 1/hbar together with a power of hbar; the tests pin that table.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .algebra import (
    NonlinearSystem,
    SolverConfig,
    characteristic_coefficients,
    elementary_symmetric_all,
    homotopy_continue,
)
from .errors import DomainError, PathSingularityError, SingularityError

__all__ = [
    "TRSSystem",
    "CMPoint",
    "SpectrumTarget",
    "lax_matrix",
    "hamiltonians_charpoly",
    "hamiltonians_subset",
    "trace_formula",
    "lax_from_cm_point",
    "solve_momenta",
    "qk_ring_residual",
    "hbar_path",
]

# relative threshold below which a difference counts as a collision
SINGULAR_EPS = 1e-13


def _tiny(x: complex, scale: float) -> bool:
    return abs(x) <= SINGULAR_EPS * max(1.0, scale)


@dataclass(frozen=True)
class TRSSystem:
    chi: tuple
    hbar: complex
    momenta: tuple

    def __init__(self, chi: Sequence, hbar: complex, momenta: Sequence):
        object.__setattr__(self, "chi", tuple(chi))
        object.__setattr__(self, "hbar", hbar)
        object.__setattr__(self, "momenta", tuple(momenta))
        if len(self.chi) != len(self.momenta):
            raise DomainError("chi and momenta must have equal length")
        if len(self.chi) == 0:
            raise DomainError("need at least one particle")

    @property
    def n(self) -> int:
        return len(self.chi)

    def check(self, resonances: bool = True) -> None:
        """Raise SingularityError on coincident coordinates or chi_i = hbar chi_j."""
        chi, h = self.chi, self.hbar
        for i, c in enumerate(chi):
            if _tiny(c, 1.0):
                raise SingularityError(f"chi[{i}] is zero", where=f"chi[{i}]")
        for i in range(self.n):
            for j in range(self.n):
                if i == j:
                    continue
                scale = abs(chi[i]) + abs(chi[j])
                if _tiny(chi[i] - chi[j], scale):
                    raise SingularityError(f"chi[{i}] == chi[{j}]", where=f"chi[{i}],chi[{j}]")
                if resonances and _tiny(chi[i] - h * chi[j], scale * max(1.0, abs(h))):
                    raise SingularityError(
                        f"resonance chi[{i}] = hbar*chi[{j}]", where=f"chi[{i}],chi[{j}]"
                    )


@dataclass(frozen=True)
class CMPoint:
    """(M, T, u, v) with hbar*M*T - T*M = u v^T."""

    M: np.ndarray
    T: np.ndarray
    u: np.ndarray
    v: np.ndarray
    hbar: complex

    def moment_residual(self) -> float:
        lhs = self.hbar * self.M @ self.T - self.T @ self.M
        return float(np.max(np.abs(lhs - np.outer(self.u, self.v))))

    def moment_matrix(self) -> np.ndarray:
        return self.hbar * self.M @ self.T - self.T @ self.M


@dataclass(frozen=True)
class SpectrumTarget:
    xi: tuple

    def __init__(self, xi: Sequence):
        xi = tuple(complex(x) for x in xi)
        if not all(np.isfinite(x) for x in xi):
            raise DomainError("target eigenvalues must be finite")
        object.__setattr__(self, "xi", xi)

    def elementary(self) -> list:
        return elementary_symmetric_all(self.xi)[1:]


def lax_matrix(sys: TRSSystem) -> np.ndarray:
    """L[j, i] = prod_{k!=i}(chi_j - chi_k hbar) / prod_{k!=j}(chi_j - chi_k) * p_j."""
    sys.check()
    chi = np.asarray(sys.chi, dtype=complex)
    p = np.asarray(sys.momenta, dtype=complex)
    h = sys.hbar
    n = sys.n
    L = np.empty((n, n), dtype=complex)
    for j in range(n):
        denom = np.prod([chi[j] - chi[k] for k in range(n) if k != j])
        for i in range(n):
            num = np.prod([chi[j] - chi[k] * h for k in range(n) if k != i])
            L[j, i] = num / denom * p[j]
    return L


def hamiltonians_charpoly(sys: TRSSystem) -> tuple:
    return characteristic_coefficients(lax_matrix(sys))


def subset_coefficient(chi: Sequence, hbar, subset) -> complex:
    """prod_{i in I, j not in I} (hbar chi_i - chi_j)/(chi_i - chi_j)."""
    inside = set(subset)
    out = 1
    for i in inside:
        for j in range(len(chi)):
            if j not in inside:
                out *= (hbar * chi[i] - chi[j]) / (chi[i] - chi[j])
    return out


def hamiltonians_subset(sys: TRSSystem) -> tuple:
    """H_k as the explicit sum over k-subsets."""
    sys.check(resonances=False)
    chi, p, n = sys.chi, sys.momenta, sys.n
    out = []
    for k in range(1, n + 1):
        total = 0
        for subset in combinations(range(n), k):
            term = subset_coefficient(chi, sys.hbar, subset)
            for m in subset:
                term *= p[m]
            total += term
        out.append(total)
    return tuple(out)


def trace_formula(sys: TRSSystem) -> complex:
    """sum_i prod_{k!=i}(chi_i - chi_k hbar)/(chi_i - chi_k) p_i."""
    chi, h, p = sys.chi, sys.hbar, sys.momenta
    total = 0
    for i in range(sys.n):
        term = p[i]
        for k in range(sys.n):
            if k != i:
                term *= (chi[i] - chi[k] * h) / (chi[i] - chi[k])
        total += term
    return total


def lax_from_cm_point(sys: TRSSystem) -> CMPoint:
    """Calogero–Moser point in the gauge M = diag(chi), v = (1, ..., 1)."""
    sys.check()
    chi = np.asarray(sys.chi, dtype=complex)
    p = np.asarray(sys.momenta, dtype=complex)
    h = sys.hbar
    n = sys.n
    if _tiny(h - 1, 1.0):
        # T_ii = u_i / ((hbar - 1) chi_i) is 0/0 at hbar = 1
        raise SingularityError("hbar = 1 has no Calogero–Moser point", where="hbar")
    u = np.empty(n, dtype=complex)
    for i in range(n):
        num = np.prod([chi[i] - chi[k] * h for k in range(n)])
        den = np.prod([chi[i] - chi[k] for k in range(n) if k != i])
        u[i] = -p[i] * num / den
    v = np.ones(n, dtype=complex)
    T = u[:, None] * v[None, :] / (h * chi[:, None] - chi[None, :])
    return CMPoint(M=np.diag(chi), T=T, u=u, v=v, hbar=h)


def hbar_path(target: complex, steps: int, bulge: float = 0.5) -> list:
    """Path from 1 to ``target`` bent off the straight segment.

    The straight segment is avoided because real targets put resonances
    hbar = chi_i/chi_j right on it (e.g. chi=(2,1), hbar 1 -> 3 crosses 2).
    """
    d = target - 1
    return [1 + d * (t + 1j * bulge * t * (1 - t)) for t in np.linspace(0.0, 1.0, steps + 1)]


def _momentum_system(chi, hbar, rhs) -> NonlinearSystem:
    rhs = np.asarray(rhs, dtype=complex)

    def residual(p):
        return np.asarray(hamiltonians_charpoly(TRSSystem(chi, hbar, p))) - rhs

    return NonlinearSystem(arity=len(chi), residual=residual, parameter=hbar)


def solve_momenta(
    chi: Sequence,
    hbar: complex,
    target: SpectrumTarget | Sequence,
    config: SolverConfig = SolverConfig(),
    permutation: Sequence[int] | None = None,
    path: Sequence | None = None,
) -> np.ndarray:
    """Momenta p whose Lax matrix has spectrum ``target``.

    Continues in hbar from 1, where H_k = e_k(p) and p = xi (permuted by
    ``permutation`` if given) is an exact solution.
    """
    if not isinstance(target, SpectrumTarget):
        target = SpectrumTarget(target)
    chi = tuple(chi)
    n = len(chi)
    if len(target.xi) != n:
        raise DomainError("target length must match chi")
    TRSSystem(chi, 1.0, [0] * n).check(resonances=False)
    perm = list(range(n)) if permutation is None else list(permutation)
    if sorted(perm) != list(range(n)):
        raise DomainError(f"not a permutation: {permutation}")
    seed = np.array([target.xi[k] for k in perm], dtype=complex)
    rhs = target.elementary()
    if path is None:
        path = hbar_path(hbar, config.step_count)

    def guard(h):
        try:
            TRSSystem(chi, h, [0] * n).check()
        except SingularityError as exc:
            raise PathSingularityError(
                f"hbar path hits a resonance at hbar={h}: {exc}", parameter=h, where=exc.where
            ) from exc

    for h in path:
        guard(h)
    return homotopy_continue(lambda h: _momentum_system(chi, h, rhs), seed, path, config)


def qk_ring_residual(zeta: Sequence, a: Sequence, hbar: complex, p: Sequence) -> np.ndarray:
    """(H_r(zeta, p, hbar) - e_r(a))_r, with H_r from the Lax characteristic polynomial."""
    if not (len(zeta) == len(a) == len(p)):
        raise DomainError("zeta, a and p must have equal length")
    H = hamiltonians_charpoly(TRSSystem(zeta, hbar, p))
    e = elementary_symmetric_all(list(a))[1:]
    return np.asarray(H, dtype=complex) - np.asarray(e, dtype=complex)
