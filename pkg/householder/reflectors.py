"""
Unpivoted Householder QR of tall-thin blocks and compact WY application
"""

import logging
from typing import Optional, Tuple

import numpy as np

from dense.core import DenseMatrix, as_dense, gemm, matmul, record_flops
from models.errors import DimensionMismatchError, ParameterError
from models.factorizations import HouseholderFactor

logger = logging.getLogger(__name__)


def householder_vector(x: np.ndarray) -> Tuple[float, np.ndarray, float]:
    """
    Reflector H = I - tau v v^T with H x = mu e_1 and mu >= 0

    Args:
        x: Vector to annihilate below its first entry

    Returns:
        (tau, v, mu) with v[0] = 1
    """
    v = np.array(x, dtype=np.float64, copy=True)
    head = float(v[0])
    sigma = float(v[1:] @ v[1:])
    v[0] = 1.0

    if sigma == 0.0:
        if head >= 0.0:
            return 0.0, v, head
        # pure sign flip
        return 2.0, v, -head

    mu = float(np.hypot(head, np.sqrt(sigma)))
    if head <= 0.0:
        v_head = head - mu
    else:
        v_head = -sigma / (head + mu)
    tau = 2.0 * v_head * v_head / (sigma + v_head * v_head)
    v[1:] /= v_head
    return tau, v, mu


def qr_unpivoted(B: DenseMatrix) -> Tuple[HouseholderFactor, DenseMatrix]:
    """
    Householder QR B = Q [R; 0] without pivoting

    Args:
        B: m x b matrix (m < b allowed; then only m reflectors are produced)

    Returns:
        (Q, R) with R of size min(m, b) x b, upper triangular, non-negative diagonal
    """
    work = as_dense(B, copy=True)
    m, nb = work.shape
    if m < 1 or nb < 1:
        raise ParameterError(f"qr_unpivoted needs a non-empty matrix, got {m}x{nb}")

    k = min(m, nb)
    vectors = np.zeros((m, k), order='F')
    tau = np.zeros(k)

    for j in range(k):
        t, v, mu = householder_vector(work[j:, j])
        vectors[j:, j] = v
        tau[j] = t
        if t != 0.0 and j + 1 < nb:
            trailing = work[j:, j + 1:]
            trailing -= t * np.outer(v, v @ trailing)
            record_flops(4 * (m - j) * (nb - j - 1))
        work[j, j] = mu
        work[j + 1:, j] = 0.0

    R = np.triu(work[:k, :])
    factor = HouseholderFactor(m=m, b=k, vectors=vectors, tau=tau)
    return factor, np.asfortranarray(R)


def build_wy(Q: HouseholderFactor) -> HouseholderFactor:
    """
    Accumulate Q = I + W Y by the forward recurrence

    Appending H_j = I - tau_j v_j v_j^T gives W <- [W, -tau_j (v_j + W (Y v_j))], Y <- [Y; v_j^T].
    """
    if Q.has_wy:
        return Q
    m, b = Q.m, Q.b
    W = np.zeros((m, b), order='F')
    Y = np.asfortranarray(Q.vectors.T.copy())
    for j in range(b):
        v = Q.vectors[:, j]
        if j == 0:
            W[:, 0] = -Q.tau[0] * v
        else:
            W[:, j] = -Q.tau[j] * (v + W[:, :j] @ (Y[:j, :] @ v))
            record_flops(4 * m * j)
    return Q.model_copy(update={"W": W, "Y": Y})


def _with_wy(Q: HouseholderFactor) -> HouseholderFactor:
    return Q if Q.has_wy else build_wy(Q)


def apply_left(Q: HouseholderFactor, transpose: bool, C: DenseMatrix) -> DenseMatrix:
    """
    Q C or Q^T C through the WY form (two gemm calls)

    Args:
        Q: Reflector product acting on m-vectors
        transpose: Apply Q^T instead of Q
        C: m x n matrix

    Returns:
        A new m x n matrix
    """
    C = as_dense(C, check_finite=False)
    if C.shape[0] != Q.m:
        raise DimensionMismatchError(f"apply_left: Q acts on {Q.m} rows, C is {C.shape[0]}x{C.shape[1]}")
    out = np.array(C, order='F', copy=True)
    if Q.b == 0 or C.shape[1] == 0:
        return out
    Q = _with_wy(Q)
    if not transpose:
        gemm(1.0, Q.W, False, matmul(Q.Y, C), False, 1.0, out)
    else:
        gemm(1.0, Q.Y, True, matmul(Q.W, C, trans_a=True), False, 1.0, out)
    return out


def apply_right(Q: HouseholderFactor, transpose: bool, C: DenseMatrix) -> DenseMatrix:
    """C Q or C Q^T through the WY form (two gemm calls)"""
    C = as_dense(C, check_finite=False)
    if C.shape[1] != Q.m:
        raise DimensionMismatchError(f"apply_right: Q acts on {Q.m} columns, C is {C.shape[0]}x{C.shape[1]}")
    out = np.array(C, order='F', copy=True)
    if Q.b == 0 or C.shape[0] == 0:
        return out
    Q = _with_wy(Q)
    if not transpose:
        gemm(1.0, matmul(C, Q.W), False, Q.Y, False, 1.0, out)
    else:
        gemm(1.0, matmul(C, Q.Y, trans_b=True), False, Q.W, True, 1.0, out)
    return out


def apply_sequential(Q: HouseholderFactor, transpose: bool, C: DenseMatrix) -> DenseMatrix:
    """Reflector-by-reflector application of Q or Q^T from the left (reference path)"""
    out = np.array(as_dense(C, check_finite=False), order='F', copy=True)
    if out.shape[0] != Q.m:
        raise DimensionMismatchError(f"apply_sequential: Q acts on {Q.m} rows, C has {out.shape[0]}")
    order = range(Q.b) if transpose else reversed(range(Q.b))
    for j in order:
        v = Q.vectors[:, j]
        out -= Q.tau[j] * np.outer(v, v @ out)
    return out


def explicit_q(Q: HouseholderFactor, columns: Optional[int] = None) -> DenseMatrix:
    """Materialize Q, or only its leading ``columns`` columns"""
    ncols = Q.m if columns is None else columns
    return apply_left(Q, False, np.eye(Q.m, ncols, order='F'))
