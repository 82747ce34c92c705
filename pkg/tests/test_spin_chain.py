import numpy as np
import pytest

from qkint.errors import DomainError, SingularityError
from qkint.spin_chain import (
    RMatrixConvention,
    SpinChainSpec,
    magnon_leakage,
    permutation_matrix,
    qkz_flatness_residual,
    qkz_operator,
    r_matrix,
    site_operator,
    transfer_matrix,
    two_site_operator,
    unitarity_residual,
    yang_baxter_residual,
)

from conftest import rand_c

I2 = np.eye(2)


def random_spec(rng, n, perturbation=0.0):
    h = complex(rand_c(rng))
    return SpinChainSpec(tuple(rand_c(rng, n)), complex(rand_c(rng)), complex(rand_c(rng)), h,
                         RMatrixConvention(h, perturbation))


def test_r_at_one_is_permutation(rng):
    for _ in range(5):
        conv = RMatrixConvention(complex(rand_c(rng)))
        assert np.array_equal(r_matrix(1.0, conv), permutation_matrix())


def test_unitarity(rng):
    conv = RMatrixConvention(complex(rand_c(rng)))
    for u in rand_c(rng, 20):
        assert unitarity_residual(u, conv) <= 1e-12


def test_hbar_one_degenerates_to_identity(rng):
    # documented: this entry rule goes to the identity, not P, at hbar = 1
    conv = RMatrixConvention(1.0)
    for u in rand_c(rng, 5):
        assert np.allclose(r_matrix(u, conv), np.eye(4), atol=1e-15)


def test_r_poles():
    conv = RMatrixConvention(2.0)
    with pytest.raises(SingularityError):
        r_matrix(0.5, conv)
    with pytest.raises(SingularityError):
        r_matrix(0, conv)


def test_ice_rule_structure(rng):
    R = r_matrix(complex(rand_c(rng)), RMatrixConvention(complex(rand_c(rng))))
    mask = np.ones((4, 4), bool)
    for i, j in [(0, 0), (1, 1), (1, 2), (2, 1), (2, 2), (3, 3)]:
        mask[i, j] = False
    assert np.all(R[mask] == 0)


def test_two_site_embedding_matches_kron(rng):
    R = rand_c(rng, (4, 4))
    P = permutation_matrix()
    assert np.allclose(two_site_operator(R, 0, 1, 2), R)
    assert np.allclose(two_site_operator(R, 1, 0, 2), P @ R @ P)
    # sites (0, 2) of three: conjugate (R x 1) by the swap of sites 1, 2
    swap12 = np.kron(I2, P)
    assert np.allclose(two_site_operator(R, 0, 2, 3), swap12 @ np.kron(R, I2) @ swap12)
    assert np.allclose(two_site_operator(R, 1, 2, 3), np.kron(I2, R))


def test_yang_baxter(rng):
    conv = RMatrixConvention(complex(rand_c(rng)))
    for _ in range(20):
        assert yang_baxter_residual(*rand_c(rng, 3), conv) <= 1e-12
    a = rand_c(rng, 2)
    assert yang_baxter_residual(a[0], a[0], a[1], conv) <= 1e-12


def test_yang_baxter_detects_perturbation(rng):
    conv = RMatrixConvention(complex(rand_c(rng)), perturbation=1e-3)
    assert yang_baxter_residual(*rand_c(rng, 3), conv) > 1e-6


def test_transfer_single_site(rng):
    spec = random_spec(rng, 1)
    u = complex(rand_c(rng))
    full = np.kron(np.diag([spec.twist, 1 / spec.twist]), I2) @ r_matrix(u / spec.site_params[0], spec.convention)
    ref = full[:2, :2] + full[2:, 2:]
    assert np.allclose(transfer_matrix(u, spec).matrix, ref)


def test_transfer_two_sites_by_kron(rng):
    spec = random_spec(rng, 2)
    u = complex(rand_c(rng))
    a = spec.site_params
    P = permutation_matrix()
    swap12 = np.kron(I2, P)
    R_a1 = np.kron(r_matrix(u / a[0], spec.convention), I2)
    R_a2 = swap12 @ np.kron(r_matrix(u / a[1], spec.convention), I2) @ swap12
    mono = np.kron(np.diag([spec.twist, 1 / spec.twist]), np.eye(4)) @ R_a2 @ R_a1
    ref = mono[:4, :4] + mono[4:, 4:]
    assert np.allclose(transfer_matrix(u, spec).matrix, ref)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_transfer_commutes_and_preserves_magnons(rng, n):
    spec = random_spec(rng, n)
    for _ in range(5):
        u, v = rand_c(rng, 2)
        A = transfer_matrix(u, spec)
        B = transfer_matrix(v, spec).matrix
        assert np.max(np.abs(A.matrix @ B - B @ A.matrix)) <= 1e-10
        assert magnon_leakage(A) == 0


def test_qkz_single_site(rng):
    spec = random_spec(rng, 1)
    assert np.allclose(qkz_operator(1, spec).matrix, np.diag([spec.twist, 1 / spec.twist]))
    with pytest.raises(DomainError):
        qkz_operator(2, spec)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_qkz_flat(rng, n):
    spec = random_spec(rng, n)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                assert qkz_flatness_residual(spec, i, j) <= 1e-10
        assert magnon_leakage(qkz_operator(i, spec)) == 0


def test_qkz_flatness_detects_perturbation(rng):
    # at n = 2 a perturbed |00> entry is a scalar on its own block and drops out
    spec = random_spec(rng, 3, perturbation=1e-3)
    assert qkz_flatness_residual(spec, 1, 2) > 1e-6


def test_qkz_as_printed_is_not_flat(rng):
    """The literal product Z R_{k1}(a_k/a_1)...R_{kn}(q a_k/a_n) fails flatness,
    which is why qkz_operator moves the twist between the two blocks."""
    spec = random_spec(rng, 3)
    a, q, conv, n = spec.site_params, spec.q, spec.convention, spec.n

    def literal(k, params):
        i = k - 1
        H = site_operator(np.diag([spec.twist, 1 / spec.twist]), i, n)
        for j in range(n):
            if j != i:
                ratio = params[i] / params[j] * (q if j > i else 1)
                H = H @ two_site_operator(r_matrix(ratio, conv), i, j, n)
        return H

    shifted_j = list(a)
    shifted_j[1] *= q
    shifted_i = list(a)
    shifted_i[0] *= q
    lhs = literal(1, shifted_j) @ literal(2, a)
    rhs = literal(2, shifted_i) @ literal(1, a)
    assert np.max(np.abs(lhs - rhs)) > 1e-3


def test_spec_validation():
    with pytest.raises(DomainError):
        SpinChainSpec((1.0, 1.0), 2.0, 0.5, 0.3)
    with pytest.raises(DomainError):
        SpinChainSpec((1.0, 0.0), 2.0, 0.5, 0.3)
    with pytest.raises(DomainError):
        qkz_flatness_residual(SpinChainSpec((1.0, 2.0), 2.0, 0.5, 0.3), 1, 1)
