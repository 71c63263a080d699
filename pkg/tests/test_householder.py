"""
Tests for Householder QR and the compact WY application
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from dense.core import count_flops, frobenius_norm, orthogonality_error
from householder.reflectors import (
    apply_left, apply_right, apply_sequential, build_wy, explicit_q, householder_vector, qr_unpivoted,
)
from models.errors import DimensionMismatchError, ParameterError
from tests.helpers import create_test_matrix


def test_upper_triangular_input_needs_no_reflection():
    """Positive-diagonal upper triangular blocks give tau = 0 and R = B"""
    B = np.asfortranarray(np.triu(create_test_matrix(5, 3, seed=1)))
    B[np.arange(3), np.arange(3)] = [3.0, 2.0, 1.0]

    Q, R = qr_unpivoted(B)

    assert np.all(Q.tau == 0.0)
    assert np.array_equal(R, B[:3, :])


def test_single_column_rotation_example():
    """[0; 5] reduces to R = [5] and Q e_1 is along (0, 1)"""
    Q, R = qr_unpivoted(np.array([[0.0], [5.0]]))

    assert R.shape == (1, 1)
    assert R[0, 0] == pytest.approx(5.0, rel=1e-15)
    q1 = explicit_q(Q)[:, 0]
    assert_allclose(q1, [0.0, 1.0], atol=1e-15)


def test_negative_head_is_a_sign_flip():
    tau, v, mu = householder_vector(np.array([-2.0]))
    assert tau == 2.0
    assert mu == 2.0
    Q, R = qr_unpivoted(np.array([[-2.0], [0.0]]))
    assert R[0, 0] == 2.0
    assert_allclose(explicit_q(Q) @ np.vstack([R, [[0.0]]]), [[-2.0], [0.0]], atol=1e-15)


def test_zero_column_gives_identity_reflector():
    Q, R = qr_unpivoted(np.zeros((4, 2)))
    assert np.all(Q.tau == 0.0)
    assert np.all(R == 0.0)
    assert np.array_equal(explicit_q(Q), np.eye(4))


def test_householder_vector_annihilates():
    x = np.array([3.0, 4.0, 0.0, -12.0])
    tau, v, mu = householder_vector(x)
    assert v[0] == 1.0
    assert mu == pytest.approx(13.0, rel=1e-15)
    Hx = x - tau * v * (v @ x)
    assert_allclose(Hx, [13.0, 0.0, 0.0, 0.0], atol=1e-14)


def test_qr_reconstruction_and_orthogonality(random_matrix):
    """Random 50 x 8 block: Q [R; 0] = B with orthonormal Q"""
    B = random_matrix(50, 8, 2)
    Q, R = qr_unpivoted(B)
    Qe = explicit_q(Q)

    assert R.shape == (8, 8)
    assert np.all(np.diag(R) >= 0.0)
    assert np.all(np.tril(R, -1) == 0.0)
    assert frobenius_norm(B - Qe[:, :8] @ R) <= 1e-13 * frobenius_norm(B)
    assert orthogonality_error(Qe) <= 1e-13 * np.sqrt(50)


def test_wide_block_gives_min_reflectors():
    """m < b: only m reflectors and an m x b trapezoidal R"""
    B = create_test_matrix(3, 5, seed=3)
    Q, R = qr_unpivoted(B)
    assert Q.b == 3
    assert R.shape == (3, 5)
    assert frobenius_norm(B - explicit_q(Q) @ R) <= 1e-14 * frobenius_norm(B)


def test_empty_block_rejected():
    with pytest.raises(ParameterError):
        qr_unpivoted(np.zeros((0, 3)))


def test_wy_of_one_reflector():
    """b = 1: W = -tau v and Y = v^T"""
    Q, _ = qr_unpivoted(create_test_matrix(6, 1, seed=4))
    Q = build_wy(Q)
    v = Q.vectors[:, 0]
    assert_allclose(Q.W[:, 0], -Q.tau[0] * v, rtol=0, atol=0)
    assert_allclose(Q.Y[0, :], v, rtol=0, atol=0)


def test_wy_of_trivial_reflectors_is_zero():
    Q, _ = qr_unpivoted(np.eye(5, 3))
    Q = build_wy(Q)
    assert np.all(Q.W @ Q.Y == 0.0)


def test_wy_matches_sequential_product():
    """Q = I + W Y agrees with the reflector-by-reflector product"""
    Q, _ = qr_unpivoted(create_test_matrix(40, 6, seed=5))
    Q = build_wy(Q)
    wy = np.eye(40) + Q.W @ Q.Y
    sequential = apply_sequential(Q, False, np.eye(40, order='F'))
    assert np.max(np.abs(wy - sequential)) <= 1e-14 * 40


@settings(max_examples=100, deadline=None)
@given(m=st.integers(min_value=1, max_value=200), b=st.integers(min_value=1, max_value=32),
       seed=st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_wy_application_property(m, b, seed):
    """WY application agrees with the sequential one on random shapes"""
    b = min(b, m)
    Q, _ = qr_unpivoted(create_test_matrix(m, b, seed))
    C = create_test_matrix(m, 3, seed + 1)

    for transpose in (False, True):
        fast = apply_left(Q, transpose, C)
        slow = apply_sequential(Q, transpose, C)
        assert frobenius_norm(fast - slow) <= 1e-13 * np.sqrt(m) * frobenius_norm(C)


def test_apply_left_round_trip():
    """Q^T (Q C) recovers C"""
    Q, _ = qr_unpivoted(create_test_matrix(30, 5, seed=6))
    C = create_test_matrix(30, 7, seed=7)
    back = apply_left(Q, True, apply_left(Q, False, C))
    assert frobenius_norm(back - C) <= 1e-13 * frobenius_norm(C)


def test_apply_left_single_column():
    Q, _ = qr_unpivoted(create_test_matrix(12, 4, seed=8))
    c = create_test_matrix(12, 1, seed=9)
    assert_allclose(apply_left(Q, False, c), apply_sequential(Q, False, c), atol=1e-14)


def test_apply_right_mirrors_left():
    """C Q = (Q^T C^T)^T and C Q^T = (Q C^T)^T"""
    Q, _ = qr_unpivoted(create_test_matrix(20, 5, seed=10))
    C = create_test_matrix(9, 20, seed=11)

    assert_allclose(apply_right(Q, False, C), apply_sequential(Q, True, C.T).T, atol=1e-13)
    assert_allclose(apply_right(Q, True, C), apply_sequential(Q, False, C.T).T, atol=1e-13)


def test_apply_dimension_mismatch():
    Q, _ = qr_unpivoted(create_test_matrix(10, 3, seed=12))
    with pytest.raises(DimensionMismatchError):
        apply_left(Q, False, np.zeros((9, 2)))
    with pytest.raises(DimensionMismatchError):
        apply_right(Q, False, np.zeros((2, 9)))


def test_wy_application_flops():
    """With W and Y cached one application costs 4 m n b"""
    m, n, b = 120, 30, 8
    Q, _ = qr_unpivoted(create_test_matrix(m, b, seed=13))
    Q = build_wy(Q)
    C = create_test_matrix(m, n, seed=14)

    with count_flops() as counter:
        apply_left(Q, True, C)

    assert counter.flops <= 1.5 * 4 * m * n * b


if __name__ == "__main__":
    pytest.main([__file__])
