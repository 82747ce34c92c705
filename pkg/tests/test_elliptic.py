import cmath
from itertools import combinations

import numpy as np
import pytest

from qkint.algebra import SolverConfig
from qkint.errors import CollisionError, DomainError, SingularityError
from qkint.elliptic import (
    ADHMBetheProblem,
    ERSCoefficientRequest,
    ThetaParams,
    adhm_bethe_solve,
    adhm_bethe_track,
    adhm_residual,
    adhm_uncleared_residual,
    ers_coefficient_derivative,
    ers_hamiltonian_coefficient,
    ers_hamiltonians,
    string_seed,
    theta_trunc,
    universal_bundle_eigenvalue,
)
from qkint.trs import TRSSystem, hamiltonians_subset, subset_coefficient

from conftest import rand_c


def unit_disc(rng, radius):
    return radius * cmath.exp(2j * np.pi * rng.random())


def test_theta_trivial(rng):
    zero = ThetaParams(0.0)
    for x in rand_c(rng, 5):
        assert theta_trunc(x, zero) == 1 - x
    assert theta_trunc(1.0, ThetaParams(0.2 + 0.1j)) == 0
    with pytest.raises(DomainError):
        theta_trunc(0, zero)
    with pytest.raises(DomainError):
        ThetaParams(1.0)


def test_quasi_periodicity(rng):
    params = ThetaParams(unit_disc(rng, 0.1), 16)
    for x in rand_c(rng, 20):
        assert abs(theta_trunc(params.p_ell * x, params) + theta_trunc(x, params) / x) <= 1e-12


def test_truncation_converges_within_accuracy_bound(rng):
    # |p|^(M+1) < 1e-16 is the accuracy target carried by ThetaParams
    for _ in range(10):
        p = unit_disc(rng, 0.1)
        lo, hi = ThetaParams(p, 16), ThetaParams(p, 32)
        assert lo.truncation_error_bound() < 1e-16
        for x in rand_c(rng, 5):
            assert abs(theta_trunc(x, lo) - theta_trunc(x, hi)) <= 1e-12


@pytest.mark.xfail(strict=True, reason="the first dropped factor is ~|p|^17 = 1.3e-9 at |p| = 0.3")
def test_truncation_converges_at_p_03(rng):
    p = 0.3
    x = 1.0 + 0.5j
    assert abs(theta_trunc(x, ThetaParams(p, 16)) - theta_trunc(x, ThetaParams(p, 32))) <= 1e-12


@pytest.mark.parametrize("n", range(2, 6))
def test_trigonometric_limit(rng, n):
    zero = ThetaParams(0.0)
    for _ in range(5):
        x, h = rand_c(rng, n), complex(rand_c(rng))
        for r in range(1, n + 1):
            for subset in combinations(range(n), r):
                ell = ers_hamiltonian_coefficient(ERSCoefficientRequest(subset, tuple(x), h, zero))
                trig = subset_coefficient(x, h, subset)
                assert abs(ell - trig) <= 1e-12 * max(1, abs(trig))


def test_trigonometric_limit_of_hamiltonians(rng):
    x, p, h = rand_c(rng, 4), rand_c(rng, 4), complex(rand_c(rng))
    ell = ers_hamiltonians(x, p, h, ThetaParams(0.0))
    trig = hamiltonians_subset(TRSSystem(x, h, p))
    assert np.allclose(ell, trig, rtol=1e-12, atol=1e-12)


def test_hbar_one_gives_one(rng):
    params = ThetaParams(unit_disc(rng, 0.2))
    x = tuple(rand_c(rng, 4))
    for subset in [(0,), (1, 3), (0, 2, 3)]:
        assert abs(ers_hamiltonian_coefficient(ERSCoefficientRequest(subset, x, 1.0, params)) - 1) <= 1e-14


def test_p_derivative_matches_finite_difference(rng):
    x = tuple(rand_c(rng, 3))
    h = complex(rand_c(rng))
    p = unit_disc(rng, 0.15)
    step = 1e-6
    for subset in [(0,), (1,), (0, 2)]:
        req = ERSCoefficientRequest(subset, x, h, ThetaParams(p))
        f = lambda pp: ers_hamiltonian_coefficient(ERSCoefficientRequest(subset, x, h, ThetaParams(pp)))
        fd = (f(p + step) - f(p - step)) / (2 * step)
        an = ers_coefficient_derivative(req)
        assert abs(fd - an) <= 1e-6 * max(1, abs(an))


def test_ers_singular_denominator():
    # x_0/x_1 = p makes theta(x_0/x_1) vanish through its m = 1 factor
    params = ThetaParams(0.5, 4)
    with pytest.raises(SingularityError):
        ers_hamiltonian_coefficient(ERSCoefficientRequest((1,), (1.0, 2.0), 0.3, params))


A1 = 1.2 + 0.3j
Q = 0.7 + 0.4j


def test_adhm_k1_n1_exact():
    c = 0.3 - 0.2j
    s = adhm_bethe_solve(ADHMBetheProblem((A1,), 1, Q, c), [1])
    assert abs(s[0] - (A1 + c)) <= 1e-12


def test_adhm_string_is_exact_at_zero():
    prob = ADHMBetheProblem((A1,), 2, Q, 0.0)
    seed = string_seed(prob, [2])
    assert np.allclose(seed, [A1, Q * A1])
    assert np.max(np.abs(adhm_residual(seed, prob.a_params, Q, 0.0))) == 0


def test_adhm_k1_n2_quadratic_oracle():
    a1, a2, c = 1.0 + 0.2j, -0.8 + 0.5j, 0.05 - 0.03j
    s = adhm_bethe_solve(ADHMBetheProblem((a1, a2), 1, Q, c), [1, 0])[0]
    disc = cmath.sqrt((a1 - a2) ** 2 + 4 * c)
    roots = [((a1 + a2) + disc) / 2, ((a1 + a2) - disc) / 2]
    branch = min(roots, key=lambda r: abs(r - a1))
    assert abs(s - branch) <= 1e-12


@pytest.mark.parametrize("comp", [[2, 1], [1, 2], [3, 0]])
def test_adhm_endpoint_and_continuity(comp):
    prob = ADHMBetheProblem((1.2 + 0.3j, -0.5 + 0.9j), 3, Q, 0.2 + 0.1j)
    path, roots = adhm_bethe_track(prob, comp)
    end = roots[-1]
    assert np.max(np.abs(adhm_uncleared_residual(end, prob.a_params, Q, prob.coupling))) <= 1e-10
    dc = abs(path[1] - path[0])
    for r0, r1 in zip(roots, roots[1:]):
        assert np.max(np.abs(r1 - r0)) <= 10 * dc


def test_distinct_seeds_stay_distinct():
    prob = ADHMBetheProblem((1.2 + 0.3j, -0.5 + 0.9j), 3, Q, 1e-3)
    sets = [np.sort_complex(adhm_bethe_solve(prob, c)) for c in ([3, 0], [2, 1], [1, 2], [0, 3])]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            assert np.max(np.abs(sets[i] - sets[j])) > 1e-6


def test_adhm_errors():
    with pytest.raises(DomainError):
        string_seed(ADHMBetheProblem((A1,), 2, Q, 0.1), [1])
    with pytest.raises(DomainError):
        ADHMBetheProblem((A1,), 1, -1.0, 0.1)
    # q = 1 puts the whole string on one point
    with pytest.raises(DomainError):
        ADHMBetheProblem((A1,), 2, 1.0, 0.1)
    # q just off 1 passes the root-of-unity test but the string is nearly degenerate
    with pytest.raises(CollisionError):
        adhm_bethe_solve(ADHMBetheProblem((A1,), 2, 1 + 1e-11, 0.1), [2], SolverConfig(step_count=4))

def test_universal_bundle(rng):
    roots = rand_c(rng, 3)
    assert universal_bundle_eigenvalue(roots, 1.0) == 1
    assert universal_bundle_eigenvalue(roots, 1.0, 2.5) == 1
    compact = universal_bundle_eigenvalue(roots, Q)
    full = universal_bundle_eigenvalue(roots, Q, 1e6)
    assert abs(full - compact) <= 1e-5 * abs(compact)
    c = 0.3 - 0.2j
    s = adhm_bethe_solve(ADHMBetheProblem((A1,), 1, Q, c), [1])
    assert abs(universal_bundle_eigenvalue(s, Q) - (1 - (1 - Q) * (A1 + c))) <= 1e-12
