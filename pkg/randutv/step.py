"""
One randUTV step: a randomized right transform, a QR on the left, then a small SVD
"""

import logging
from typing import Optional

import numpy as np

from baselines.jacobi import jacobi_svd
from baselines.tall_thin import left_singular_vectors, tall_thin_svd
from dense.core import DenseMatrix, as_dense, matmul
from householder.reflectors import apply_left, apply_right, explicit_q, qr_unpivoted
from models.errors import ParameterError
from models.factorizations import StepResult
from randsample.range_finder import default_reorthonormalize, sample_row_space
from randsample.stream import RandomStream, gaussian_matrix

logger = logging.getLogger(__name__)


def _check_step(A: DenseMatrix, b: int, q: int, p: int = 0) -> None:
    m, n = A.shape
    if not 1 <= b < min(m, n):
        raise ParameterError(f"b={b} must satisfy 1 <= b < min(m, n) = {min(m, n)}")
    if q < 0:
        raise ParameterError(f"q={q} must be non-negative")
    if p < 0 or b + p > n:
        raise ParameterError(f"p={p} must satisfy 0 <= p <= n - b = {n - b}")


def reduce_sample(Y: DenseMatrix, b: int) -> DenseMatrix:
    """Leading b left singular vectors of an oversampled n x (b + p) sample"""
    Qy, core = tall_thin_svd(Y)
    return left_singular_vectors(Qy, core)[:, :b]


def step_from_sample(A: DenseMatrix, Y: DenseMatrix, b: int) -> StepResult:
    """
    Build A = U T V^T from a sample Y of the row space of A

    V = V_house diag(V_s, I) where V_house comes from the QR of Y; U = U_house diag(U_s, I)
    where U_house comes from the QR of A V_house(:, 1:b); U_s D V_s^T is the SVD of that
    QR's triangular factor.
    """
    Vfac, _ = qr_unpivoted(Y)
    AV = apply_right(Vfac, False, A)
    Ufac, R = qr_unpivoted(AV[:, :b])
    T = apply_left(Ufac, True, AV)

    core = jacobi_svd(R[:b, :b])
    T[b:, :b] = 0.0
    T[:b, :b] = np.diag(core.sigma)
    T[:b, b:] = matmul(core.U, T[:b, b:], trans_a=True)

    U = explicit_q(Ufac)
    U[:, :b] = matmul(U[:, :b], core.U)
    V = explicit_q(Vfac)
    V[:, :b] = matmul(V[:, :b], core.V)
    return StepResult(U=U, T=T, V=V, b=b)


def step_utv(A: DenseMatrix, b: int, q: int, stream: RandomStream,
             reorthonormalize: Optional[bool] = None) -> StepResult:
    """
    Single randUTV step A = U T V^T

    Args:
        A: m x n matrix
        b: Block size, 1 <= b < min(m, n)
        q: Power iteration count
        stream: Supplies the m x b Gaussian draw
        reorthonormalize: Stabilize the power iteration (settings default when omitted)

    Returns:
        StepResult with T11 diagonal (non-negative, non-increasing) and T21 exactly zero
    """
    A = as_dense(A)
    _check_step(A, b, q)
    if reorthonormalize is None:
        reorthonormalize = default_reorthonormalize()
    G = gaussian_matrix(stream, A.shape[0], b)
    Y = sample_row_space(A, G, q, reorthonormalize)
    return step_from_sample(A, Y, b)


def step_utv_oversampled(A: DenseMatrix, b: int, q: int, p: int, stream: RandomStream,
                         reorthonormalize: Optional[bool] = None) -> StepResult:
    """
    randUTV step drawing b + p sample columns

    The n x (b + p) sample is cut back to its b dominant left singular vectors before
    the QR that builds the right transform. p = 0 is exactly ``step_utv``.
    """
    if p == 0:
        return step_utv(A, b, q, stream, reorthonormalize=reorthonormalize)
    A = as_dense(A)
    _check_step(A, b, q, p)
    if reorthonormalize is None:
        reorthonormalize = default_reorthonormalize()
    G = gaussian_matrix(stream, A.shape[0], b + p)
    Y = sample_row_space(A, G, q, reorthonormalize)
    return step_from_sample(A, reduce_sample(Y, b), b)
