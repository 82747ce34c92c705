"""XXZ chains of two-dimensional evaluation modules.

Basis of C^2 (x) ... (x) C^2 is the Kronecker basis with site 0 the most
significant bit; bit value 1 is a flipped spin (one magnon).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, SingularityError

__all__ = [
    "RMatrixConvention",
    "SpinChainSpec",
    "ChainOperator",
    "r_matrix",
    "permutation_matrix",
    "two_site_operator",
    "site_operator",
    "yang_baxter_residual",
    "unitarity_residual",
    "transfer_matrix",
    "qkz_operator",
    "qkz_flatness_residual",
    "magnon_number",
    "magnon_leakage",
]

POLE_EPS = 1e-14


@dataclass(frozen=True)
class RMatrixConvention:
    """Six-vertex trigonometric entry rule, normalised so that R(1) = P.

    In the basis |00>, |01>, |10>, |11>::

        R(u) = [[1, 0, 0, 0],
                [0, b, c+, 0],
                [0, c-, b, 0],
                [0, 0, 0, 1]]

    with d = u*hbar - 1, b = sqrt(hbar)(u - 1)/d, c+ = (hbar - 1)u/d,
    c- = (hbar - 1)/d (principal branch of the square root). At hbar = 1
    this degenerates to the identity for u != 1, not to P.

    ``perturbation`` adds a constant to the (0, 0) entry; it exists only
    so tests can break the Yang–Baxter equation on purpose.
    """

    hbar: complex
    perturbation: complex = 0.0

    @property
    def sqrt_hbar(self) -> complex:
        return cmath.sqrt(self.hbar)


@dataclass(frozen=True)
class SpinChainSpec:
    site_params: tuple
    twist: complex
    q: complex
    hbar: complex
    convention: RMatrixConvention | None = field(default=None, compare=False)

    def __post_init__(self):
        a = tuple(complex(x) for x in self.site_params)
        object.__setattr__(self, "site_params", a)
        if not a:
            raise DomainError("chain needs at least one site")
        if any(x == 0 for x in a):
            raise DomainError("site parameters must be nonzero")
        if self.twist == 0 or self.q == 0:
            raise DomainError("twist and q must be nonzero")
        for i in range(len(a)):
            for j in range(i + 1, len(a)):
                if abs(a[i] - a[j]) <= POLE_EPS * (abs(a[i]) + abs(a[j])):
                    raise DomainError(f"site parameters {i} and {j} coincide")
        if self.convention is None:
            object.__setattr__(self, "convention", RMatrixConvention(self.hbar))

    @property
    def n(self) -> int:
        return len(self.site_params)

    def with_site_params(self, a: Sequence) -> "SpinChainSpec":
        return SpinChainSpec(tuple(a), self.twist, self.q, self.hbar, self.convention)


@dataclass(frozen=True)
class ChainOperator:
    matrix: np.ndarray
    meta: dict

    @property
    def n_sites(self) -> int:
        return int(np.log2(self.matrix.shape[0]))


def permutation_matrix() -> np.ndarray:
    P = np.zeros((4, 4), dtype=complex)
    for a in range(2):
        for b in range(2):
            P[2 * b + a, 2 * a + b] = 1
    return P


def r_matrix(u: complex, conv: RMatrixConvention) -> np.ndarray:
    if u == 0:
        raise SingularityError("spectral ratio u = 0", where="u")
    h = conv.hbar
    d = u * h - 1
    if abs(d) <= POLE_EPS * max(1.0, abs(u * h)):
        raise SingularityError(f"R-matrix pole at u = 1/hbar (u={u})", where="u")
    if u == 1:
        # the entry rule gives P here; return it without rounding
        R = permutation_matrix()
        R[0, 0] += conv.perturbation
        return R
    R = np.zeros((4, 4), dtype=complex)
    R[0, 0] = 1 + conv.perturbation
    R[3, 3] = 1
    R[1, 1] = R[2, 2] = conv.sqrt_hbar * (u - 1) / d
    R[1, 2] = (h - 1) * u / d
    R[2, 1] = (h - 1) / d
    return R


def two_site_operator(r4: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    """Embed a 4x4 operator acting on sites (i, j), in that order, into 2^n."""
    if i == j or not (0 <= i < n and 0 <= j < n):
        raise DomainError(f"bad site pair ({i}, {j}) for {n} sites")
    t = r4.reshape(2, 2, 2, 2)  # out_i, out_j, in_i, in_j
    ident = np.eye(2 ** n, dtype=complex).reshape((2,) * (2 * n))
    # contract the input legs of sites i, j of the identity with t
    out = np.tensordot(t, ident, axes=([2, 3], [i, j]))
    # out legs now: out_i, out_j, remaining row legs (in order), all column legs
    rest = [k for k in range(n) if k != i and k != j]
    order = [0] * n
    order[i] = 0
    order[j] = 1
    for pos, k in enumerate(rest):
        order[k] = 2 + pos
    perm = order + list(range(n, 2 * n))
    return np.transpose(out, perm).reshape(2 ** n, 2 ** n)


def site_operator(m2: np.ndarray, k: int, n: int) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for s in range(n):
        out = np.kron(out, m2 if s == k else np.eye(2))
    return out


def _twist2(z: complex) -> np.ndarray:
    return np.diag([z, 1 / z]).astype(complex)


def yang_baxter_residual(a1: complex, a2: complex, a3: complex, conv: RMatrixConvention) -> float:
    """max |R12 R13 R23 - R23 R13 R12| with R_ij = R(a_i/a_j)."""
    R12 = two_site_operator(r_matrix(a1 / a2, conv), 0, 1, 3)
    R13 = two_site_operator(r_matrix(a1 / a3, conv), 0, 2, 3)
    R23 = two_site_operator(r_matrix(a2 / a3, conv), 1, 2, 3)
    return float(np.max(np.abs(R12 @ R13 @ R23 - R23 @ R13 @ R12)))


def unitarity_residual(u: complex, conv: RMatrixConvention) -> float:
    """max |R(u) P R(1/u) P - 1|."""
    P = permutation_matrix()
    return float(np.max(np.abs(r_matrix(u, conv) @ P @ r_matrix(1 / u, conv) @ P - np.eye(4))))


def transfer_matrix(u: complex, spec: SpinChainSpec) -> ChainOperator:
    """Tr_aux[(Z (x) 1) R_{aux,n}(u/a_n) ... R_{aux,1}(u/a_1)]."""
    n = spec.n
    total = n + 1  # auxiliary space is factor 0
    mono = site_operator(_twist2(spec.twist), 0, total)
    for s in range(n, 0, -1):
        mono = mono @ two_site_operator(r_matrix(u / spec.site_params[s - 1], spec.convention), 0, s, total)
    half = 2 ** n
    T = mono[:half, :half] + mono[half:, half:]
    return ChainOperator(T, {"kind": "transfer", "u": u})


def qkz_operator(k: int, spec: SpinChainSpec) -> ChainOperator:
    """qKZ operator for site k (1-based)::

        H_k = R_{k,k+1}(q a_k/a_{k+1}) ... R_{k,n}(q a_k/a_n) . Z_k
              . R_{k,1}(a_k/a_1) ... R_{k,k-1}(a_k/a_{k-1})

    so that Psi(..., q a_k, ...) = H_k Psi(...) is a flat system.
    """
    n = spec.n
    if not 1 <= k <= n:
        raise DomainError(f"site index {k} outside 1..{n}")
    a, conv, q = spec.site_params, spec.convention, spec.q
    i = k - 1
    H = np.eye(2 ** n, dtype=complex)
    for j in range(i + 1, n):
        H = H @ two_site_operator(r_matrix(q * a[i] / a[j], conv), i, j, n)
    H = H @ site_operator(_twist2(spec.twist), i, n)
    for j in range(i):
        H = H @ two_site_operator(r_matrix(a[i] / a[j], conv), i, j, n)
    return ChainOperator(H, {"kind": "qkz", "k": k})


def qkz_flatness_residual(spec: SpinChainSpec, i: int, j: int) -> float:
    """max |H_i(a_j -> q a_j) H_j(a) - H_j(a_i -> q a_i) H_i(a)| (1-based i, j)."""
    if i == j:
        raise DomainError("flatness needs two distinct indices")
    n = spec.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise DomainError(f"indices must lie in 1..{n}")
    a = list(spec.site_params)
    shifted_j = list(a)
    shifted_j[j - 1] *= spec.q
    shifted_i = list(a)
    shifted_i[i - 1] *= spec.q
    lhs = qkz_operator(i, spec.with_site_params(shifted_j)).matrix @ qkz_operator(j, spec).matrix
    rhs = qkz_operator(j, spec.with_site_params(shifted_i)).matrix @ qkz_operator(i, spec).matrix
    return float(np.max(np.abs(lhs - rhs)))


def magnon_number(n: int) -> np.ndarray:
    return np.array([bin(s).count("1") for s in range(2 ** n)])


def magnon_leakage(op: ChainOperator | np.ndarray) -> float:
    """Largest entry connecting different magnon numbers (zero by the ice rule)."""
    m = op.matrix if isinstance(op, ChainOperator) else op
    n = int(np.log2(m.shape[0]))
    mag = magnon_number(n)
    mask = mag[:, None] != mag[None, :]
    return float(np.max(np.abs(m[mask]), initial=0.0))
