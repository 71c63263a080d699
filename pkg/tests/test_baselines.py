"""
Tests for the deterministic baselines: Jacobi SVD, CPQR, QLP and the tall-thin SVD
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from baselines.cpqr import cpqr, cpqr_rank_k_approx
from baselines.jacobi import jacobi_svd, singular_values, svd_rank_k_approx
from baselines.qlp import qlp, qlp_rank_k_approx
from baselines.tall_thin import left_singular_vectors, tall_thin_svd
from config.loader import config_loader
from dense.core import count_flops, frobenius_norm, orthogonality_error, spectral_norm
from householder.reflectors import explicit_q
from models.errors import ParameterError, SizeLimitError, UnsupportedShapeError
from testmat.generators import gen_fast_decay
from tests.helpers import create_low_rank, create_matrix_with_spectrum, create_test_matrix

GOLDEN = (1.0 + np.sqrt(5.0)) / 2.0


# Jacobi SVD

@pytest.mark.parametrize("A,expected", [
    ([[0.0, 1.0], [1.0, 0.0]], [1.0, 1.0]),
    ([[3.0, 0.0], [0.0, 4.0]], [4.0, 3.0]),
    ([[1.0, 1.0], [0.0, 1.0]], [GOLDEN, 1.0 / GOLDEN]),
])
def test_jacobi_small_examples(A, expected):
    sigma = jacobi_svd(np.array(A)).sigma
    assert_allclose(sigma, expected, rtol=1e-14)


@pytest.mark.parametrize("shape", [(30, 20), (20, 30), (25, 25)])
def test_jacobi_reconstruction_and_orthogonality(shape):
    """Thin SVD reconstructs A with orthonormal factors and sorted values"""
    A = create_test_matrix(*shape, seed=1)
    svd = jacobi_svd(A)
    r = min(shape)

    assert svd.U.shape == (shape[0], r)
    assert svd.V.shape == (shape[1], r)
    assert np.all(np.diff(svd.sigma) <= 0.0)
    assert np.all(svd.sigma >= 0.0)
    assert frobenius_norm(A - svd.reconstruct()) <= 1e-13 * frobenius_norm(A)
    assert orthogonality_error(svd.U) <= 1e-13 * np.sqrt(shape[0])
    assert orthogonality_error(svd.V) <= 1e-13 * np.sqrt(shape[1])


def test_jacobi_signs_are_canonical():
    """The entry of largest magnitude in every column of U is non-negative"""
    svd = jacobi_svd(create_test_matrix(15, 10, seed=2))
    lead = np.argmax(np.abs(svd.U), axis=0)
    assert np.all(svd.U[lead, np.arange(10)] >= 0.0)


def test_jacobi_rank_deficient_completes_basis():
    """Zero singular values still come with orthonormal U columns"""
    A = create_low_rank(12, 8, 3, seed=3)
    svd = jacobi_svd(A)

    assert np.all(svd.sigma[3:] <= 1e-14 * svd.sigma[0])
    assert orthogonality_error(svd.U) <= 1e-12
    assert frobenius_norm(A - svd.reconstruct()) <= 1e-13 * frobenius_norm(A)

    zero = jacobi_svd(np.zeros((4, 3)))
    assert np.all(zero.sigma == 0.0)
    assert orthogonality_error(zero.U) <= 1e-15


def test_jacobi_matches_known_spectrum():
    sigma = np.logspace(0, -8, 20)
    A = create_matrix_with_spectrum(30, 20, sigma, seed=4)
    assert_allclose(singular_values(A), sigma, rtol=0, atol=1e-14 * 20)


def test_singular_values_agree_with_full_svd():
    A = create_test_matrix(18, 24, seed=5)
    assert_allclose(singular_values(A), jacobi_svd(A).sigma, rtol=1e-13)


def test_jacobi_respects_desk_cap(monkeypatch):
    monkeypatch.setattr(config_loader, "get_desk_cap", lambda: 5)
    with pytest.raises(SizeLimitError):
        jacobi_svd(np.eye(6))
    with pytest.raises(SizeLimitError):
        spectral_norm(np.eye(6))
    # only min(m, n) counts
    assert jacobi_svd(np.ones((10, 5))).sigma.shape == (5,)


def test_svd_rank_k_approx_is_optimal():
    A = create_test_matrix(20, 15, seed=6)
    svd = jacobi_svd(A)
    for k in (1, 5, 14):
        residual = spectral_norm(A - svd_rank_k_approx(svd, k))
        assert residual == pytest.approx(svd.sigma[k], rel=1e-11)
    assert np.all(svd_rank_k_approx(svd, 0) == 0.0)
    with pytest.raises(ParameterError):
        svd_rank_k_approx(svd, 16)


# Column-pivoted QR

def test_cpqr_of_identity_keeps_order():
    F = cpqr(np.eye(3))
    assert F.perm_one_based == (1, 2, 3)
    assert_allclose(F.R, np.eye(3), atol=0)


def test_cpqr_diagonal_example():
    """diag(3, 1, 2) pivots to (1, 3, 2) with |diag R| = (3, 2, 1)"""
    F = cpqr(np.diag([3.0, 1.0, 2.0]))
    assert F.perm_one_based == (1, 3, 2)
    assert_allclose(np.abs(np.diag(F.R)), [3.0, 2.0, 1.0], rtol=1e-15)


def test_cpqr_ties_go_to_lowest_index():
    F = cpqr(np.ones((4, 3)))
    assert F.perm[0] == 0


@pytest.mark.parametrize("shape", [(30, 20), (20, 30), (25, 25)])
def test_cpqr_reconstruction_and_pivot_order(shape):
    A = create_test_matrix(*shape, seed=7)
    F = cpqr(A)
    Q = explicit_q(F.Q)

    assert sorted(F.perm.tolist()) == list(range(shape[1]))
    assert frobenius_norm(A[:, F.perm] - Q @ F.R) <= 1e-13 * frobenius_norm(A)
    assert frobenius_norm(A @ F.permutation_matrix() - Q @ F.R) <= 1e-13 * frobenius_norm(A)
    assert orthogonality_error(Q) <= 1e-13 * np.sqrt(shape[0])
    d = np.abs(np.diag(F.R))
    assert np.all(d[1:] <= d[:-1] * (1.0 + 1e-10))


@settings(max_examples=100, deadline=None)
@given(m=st.integers(min_value=2, max_value=30), n=st.integers(min_value=2, max_value=30),
       rank=st.integers(min_value=1, max_value=30), seed=st.integers(min_value=0, max_value=10 ** 6))
def test_cpqr_diagonal_non_increasing_property(m, n, rank, seed):
    """Rank-deficient inputs included: |R(j,j)| never grows beyond rounding"""
    rank = min(rank, m, n)
    A = create_low_rank(m, n, rank, seed)
    d = np.abs(np.diag(cpqr(A).R))
    assert np.all(d[1:] <= d[:-1] + 1e-10 * d[0])


def test_cpqr_rank_k_approx():
    """Full rank gives A back, exact rank-k is captured, otherwise sigma_{k+1} bounds the error"""
    A = create_test_matrix(40, 40, seed=8)
    F = cpqr(A)
    assert frobenius_norm(A - cpqr_rank_k_approx(F, 40)) <= 1e-13 * frobenius_norm(A)

    sigma = singular_values(A)
    residual = spectral_norm(A - cpqr_rank_k_approx(F, 10))
    assert residual >= sigma[10] * (1.0 - 1e-10)

    trailing = spectral_norm(F.R[10:, 10:])
    assert trailing == pytest.approx(residual, rel=1e-11)

    B = create_low_rank(30, 20, 5, seed=9)
    G = cpqr(B)
    assert frobenius_norm(B - cpqr_rank_k_approx(G, 5)) <= 1e-12 * frobenius_norm(B)

    with pytest.raises(ParameterError):
        cpqr_rank_k_approx(F, 0)
    with pytest.raises(ParameterError):
        cpqr_rank_k_approx(F, 41)


# QLP

def test_qlp_of_identity():
    F = qlp(np.eye(5))
    assert_allclose(np.abs(F.L), np.eye(5), atol=1e-15)
    assert frobenius_norm(np.eye(5) - F.U @ F.L @ F.V.T) <= 1e-15


def test_qlp_of_sorted_diagonal():
    d = np.array([5.0, 4.0, 2.0, 1.0, 0.5])
    F = qlp(np.diag(d))
    assert_allclose(np.abs(np.diag(F.L)), d, rtol=1e-14)


def test_qlp_reconstruction_over_many_inputs():
    """Fifty random inputs across square, tall and fat shapes"""
    shapes = [(15, 15), (20, 12), (12, 20)]
    for seed in range(50):
        shape = shapes[seed % 3]
        A = create_test_matrix(*shape, seed=100 + seed)
        F = qlp(A)
        assert F.L.shape == shape
        assert np.all(np.triu(F.L, 1) == 0.0)
        assert frobenius_norm(A - F.U @ F.L @ F.V.T) <= 1e-13 * frobenius_norm(A)
        assert orthogonality_error(F.U) <= 1e-13 * np.sqrt(shape[0])
        assert orthogonality_error(F.V) <= 1e-13 * np.sqrt(shape[1])


def test_qlp_diagonal_tracks_singular_values_better_than_cpqr():
    matrix = gen_fast_decay(60, seed=3)
    sigma = matrix.known_sigma
    qlp_err = np.max(np.abs(np.abs(np.diag(qlp(matrix.A).L)) - sigma) / sigma)
    cpqr_err = np.max(np.abs(np.abs(np.diag(cpqr(matrix.A).R)) - sigma) / sigma)
    assert qlp_err <= cpqr_err


def test_qlp_rank_k_approx():
    A = create_test_matrix(25, 20, seed=10)
    F = qlp(A)
    sigma = singular_values(A)
    for k in (1, 7, 19):
        residual = spectral_norm(A - qlp_rank_k_approx(F, k))
        assert residual >= sigma[k] * (1.0 - 1e-10)
        assert spectral_norm(F.L[k:, k:]) == pytest.approx(residual, rel=1e-11)
    assert frobenius_norm(A - qlp_rank_k_approx(F, 20)) <= 1e-13 * frobenius_norm(A)
    with pytest.raises(ParameterError):
        qlp_rank_k_approx(F, 21)


# Tall-thin SVD

def test_tall_thin_of_orthonormal_columns():
    B = explicit_q(cpqr(create_test_matrix(40, 6, seed=11)).Q, columns=6)
    _, core = tall_thin_svd(B)
    assert_allclose(core.sigma, np.ones(6), rtol=1e-14)


def test_tall_thin_of_rank_one():
    u = create_test_matrix(30, 1, seed=12)
    v = create_test_matrix(5, 1, seed=13)
    _, core = tall_thin_svd(u @ v.T)
    assert core.sigma[0] == pytest.approx(np.linalg.norm(u) * np.linalg.norm(v), rel=1e-14)
    assert np.all(core.sigma[1:] <= 1e-14 * core.sigma[0])


def test_tall_thin_matches_direct_svd():
    B = create_test_matrix(200, 10, seed=14)
    Q, core = tall_thin_svd(B)
    direct = singular_values(B)
    assert np.max(np.abs(core.sigma - direct)) <= 1e-11 * direct[0]

    U = left_singular_vectors(Q, core)
    assert U.shape == (200, 10)
    assert orthogonality_error(U) <= 1e-13 * np.sqrt(200)
    assert frobenius_norm(B - (U * core.sigma) @ core.V.T) <= 1e-13 * frobenius_norm(B)


def test_tall_thin_flops_scale_with_m_b_squared():
    for m in (200, 400):
        B = create_test_matrix(m, 10, seed=15)
        with count_flops() as counter:
            tall_thin_svd(B)
        assert 0 < counter.flops <= 40 * m * 10 ** 2


def test_tall_thin_rejects_wide_blocks():
    with pytest.raises(UnsupportedShapeError):
        tall_thin_svd(create_test_matrix(4, 6))


if __name__ == "__main__":
    pytest.main([__file__])
