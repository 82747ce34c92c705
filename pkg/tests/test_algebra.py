from fractions import Fraction
from itertools import combinations
from math import prod

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from qkint.algebra import (
    NonlinearSystem,
    Polynomial,
    SolverConfig,
    characteristic_coefficients,
    dedup_roots,
    elementary_symmetric,
    faddeev_leverrier,
    homotopy_continue,
    linear_path,
    newton_solve,
)
from qkint.errors import ConvergenceError, DomainError

from conftest import rand_c


def brute_e(values, k):
    return sum(prod(c) for c in combinations(values, k))


@pytest.mark.parametrize("k,expected", [(0, 1), (1, 6), (2, 11), (3, 6)])
def test_elementary_symmetric_small(k, expected):
    assert elementary_symmetric((1, 2, 3), k) == expected
    assert brute_e((1, 2, 3), k) == expected


def test_elementary_symmetric_domain():
    with pytest.raises(DomainError):
        elementary_symmetric((1, 2), 3)
    with pytest.raises(DomainError):
        elementary_symmetric((1, 2), -1)


@given(st.lists(st.integers(-20, 20), max_size=7), st.data())
def test_elementary_symmetric_matches_subsets(values, data):
    k = data.draw(st.integers(0, len(values)))
    assert elementary_symmetric(values, k) == brute_e(values, k)


def test_charpoly_trivial():
    assert characteristic_coefficients([[1, 0], [0, 1]]) == (2, 1)
    a, b = 3 + 1j, -2.5
    H = characteristic_coefficients(np.diag([a, b]))
    assert H == pytest.approx((a + b, a * b))


def test_charpoly_rejects_non_square():
    with pytest.raises(DomainError):
        characteristic_coefficients([[1, 2, 3], [4, 5, 6]])
    with pytest.raises(DomainError):
        characteristic_coefficients(np.ones((2, 3)))


@pytest.mark.parametrize("n", range(1, 7))
def test_charpoly_against_eigenvalues(rng, n):
    for _ in range(10):
        A = rand_c(rng, (n, n))
        eig = np.linalg.eigvals(A)
        H = characteristic_coefficients(A)
        ref = [brute_e(eig, k) for k in range(1, n + 1)]
        assert np.max(np.abs(np.array(H) - ref)) <= 1e-10 * max(1, np.max(np.abs(ref)))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_exact_route_agrees_with_sympy_and_float_route(rng, n):
    A = rng.integers(-5, 6, size=(n, n)).tolist()
    exact = characteristic_coefficients(A)
    lam = sympy.Symbol("lam")
    cp = sympy.Matrix(A).charpoly(lam).all_coeffs()  # highest degree first
    assert list(exact) == [(-1) ** k * int(cp[k]) for k in range(1, n + 1)]
    numeric = characteristic_coefficients(np.array(A, dtype=float))
    assert np.allclose(numeric, exact, atol=1e-9)


def test_faddeev_leverrier_fractions():
    A = [[Fraction(1, 2), Fraction(1, 3)], [Fraction(2), Fraction(-1, 5)]]
    tr = A[0][0] + A[1][1]
    det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
    assert faddeev_leverrier(A) == [tr, det]


def test_polynomial_basics():
    p = Polynomial((1, 2, 0, 0))
    assert p.coefficients == (1, 2) and p.degree == 1
    assert Polynomial((0, 0)).is_zero() and Polynomial(()).degree == -1
    q = Polynomial.from_roots([1, -2])
    assert q.coefficients == (-2, 1, 1)
    assert (p * q)(3) == p(3) * q(3)
    assert q.scale_argument(2)(5) == q(10)
    assert q.substitute_power(3)(2) == q(8)
    assert Polynomial((5, 7, 9)).reduce_mod(4).coefficients == (1, 3, 1)


def test_newton_examples():
    sys = NonlinearSystem(1, lambda x: [x[0] ** 2 - 1])
    assert newton_solve(sys, [0.5])[0] == pytest.approx(1.0, abs=1e-12)

    A = np.array([[2.0, 1.0], [1.0, 3.0]])
    b = np.array([1.0, -2.0])
    lin = NonlinearSystem(2, lambda x: A @ x - b, jacobian=lambda x: A)
    cfg = SolverConfig()
    x = newton_solve(lin, [10.0, -7.0], cfg)
    assert np.allclose(x, np.linalg.solve(A, b), atol=1e-12)


def test_newton_postcondition_and_failure():
    cfg = SolverConfig(tolerance=1e-12)
    sys = NonlinearSystem(2, lambda x: [x[0] ** 3 - 2 + x[1], x[1] ** 2 - 0.25])
    x = newton_solve(sys, [1.0, 1.0], cfg)
    assert np.max(np.abs(sys.evaluate(x))) <= cfg.tolerance
    no_root = NonlinearSystem(1, lambda x: [x[0] ** 2 + 1])
    # x^2 + 1 has roots, but starting on the real axis with a real-valued
    # Newton map never leaves it
    with pytest.raises(ConvergenceError) as err:
        newton_solve(no_root, [0.3], SolverConfig(max_iterations=20))
    assert err.value.last_iterate is not None
    assert err.value.residual_norm > 1e-12


def test_solver_config_validation():
    assert SolverConfig() == SolverConfig(1e-12, 100, 64)
    with pytest.raises(DomainError):
        SolverConfig(tolerance=0)
    with pytest.raises(DomainError):
        SolverConfig(step_count=0)


def test_homotopy_branch():
    family = lambda t: NonlinearSystem(1, lambda x: [x[0] ** 2 - t], parameter=t)
    x = homotopy_continue(family, [1.0], linear_path(1.0, 4.0, 16))
    assert x[0] == pytest.approx(2.0, abs=1e-12)


def test_homotopy_constant_family_equals_newton():
    sys = NonlinearSystem(2, lambda x: [x[0] ** 2 + x[1] - 3, x[0] - x[1] ** 3 + 1])
    start = np.array([1.3, 0.9])
    a = homotopy_continue(lambda t: sys, start, linear_path(0, 1, 5))
    b = newton_solve(sys, start)
    assert np.allclose(a, b, atol=1e-14)


def test_homotopy_reports_failing_parameter():
    family = lambda t: NonlinearSystem(1, lambda x: [x[0] ** 2 - t], parameter=t)
    with pytest.raises(ConvergenceError) as err:
        homotopy_continue(family, [1.0], [1.0, 0.5, -1.0], SolverConfig(max_iterations=15))
    assert err.value.parameter == -1.0


def test_dedup():
    pts = [np.array([1.0, 2.0]), np.array([1.0 + 1e-10, 2.0]), np.array([1.5, 2.0])]
    assert len(dedup_roots(pts)) == 2
