"""
Randomized range finder with power iteration, and the two-stage randomized SVD
"""

import logging
from typing import Optional, Tuple

import numpy as np

from baselines.tall_thin import left_singular_vectors, tall_thin_svd
from config.loader import config_loader
from dense.core import DenseMatrix, as_dense, matmul, matrix_norm
from householder.reflectors import explicit_q, qr_unpivoted
from models.errors import ParameterError
from models.factorizations import RangeBasis, SvdResult
from randsample.stream import RandomStream, gaussian_matrix

logger = logging.getLogger(__name__)


def default_reorthonormalize() -> bool:
    return bool(config_loader.get_randutv_config().get('reorthonormalize', True))


def orthonormalize(Y: DenseMatrix) -> DenseMatrix:
    """Leading columns of Q from the unpivoted QR of Y"""
    factor, _ = qr_unpivoted(Y)
    return explicit_q(factor, min(Y.shape))


def sample_row_space(A: DenseMatrix, G: DenseMatrix, q: int, reorthonormalize: bool) -> DenseMatrix:
    """
    Y = (A^T A)^q A^T G

    With ``reorthonormalize`` the running sample is replaced by an orthonormal basis
    of its span after every A, A^T pair.
    """
    Y = matmul(A, G, trans_a=True)
    for _ in range(q):
        Y = matmul(A, matmul(A, Y), trans_a=True)
        if reorthonormalize:
            Y = orthonormalize(Y)
    return Y


def _check_block(A: DenseMatrix, width: int, name: str = "b") -> None:
    m, n = A.shape
    if not 1 <= width < min(m, n):
        raise ParameterError(f"{name}={width} must satisfy 1 <= {name} < min(m, n) = {min(m, n)}")


def range_finder(A: DenseMatrix, b: int, q: int, stream: RandomStream, p: int = 0,
                 reorthonormalize: Optional[bool] = None) -> RangeBasis:
    """
    Orthonormal n x (b + p) basis approximately spanning the dominant right singular space

    Args:
        A: m x n matrix
        b: Target rank, 1 <= b < min(m, n)
        q: Power iteration count
        stream: Source of the m x (b + p) Gaussian draw
        p: Extra sample columns
        reorthonormalize: Stabilize between applications (settings default when omitted)
    """
    A = as_dense(A)
    if q < 0 or p < 0:
        raise ParameterError(f"q={q} and p={p} must be non-negative")
    _check_block(A, b)
    width = b + p
    if width > min(A.shape):
        raise ParameterError(f"b + p = {width} exceeds min(m, n) = {min(A.shape)}")
    if reorthonormalize is None:
        reorthonormalize = default_reorthonormalize()

    G = gaussian_matrix(stream, A.shape[0], width)
    Y = sample_row_space(A, G, q, reorthonormalize)
    Q = orthonormalize(Y)[:, :width]
    logger.debug(f"Range finder on {A.shape[0]}x{A.shape[1]}: width={width}, q={q}")
    return RangeBasis(Q=Q, q_used=q, b=width)


def range_error(A: DenseMatrix, basis: RangeBasis, norm: str = "spectral") -> float:
    """||A - A Q Q^T||"""
    A = as_dense(A)
    AQ = matmul(A, basis.Q)
    return matrix_norm(A - matmul(AQ, basis.Q, trans_b=True), norm)


def rsvd(A: DenseMatrix, b: int, q: int, stream: RandomStream, p: int = 0,
         reorthonormalize: Optional[bool] = None) -> Tuple[SvdResult, float]:
    """
    Two-stage randomized SVD truncated to rank b

    Returns:
        (SVD factors, ||A - U D V^T||_2)
    """
    A = as_dense(A)
    basis = range_finder(A, b, q, stream, p=p, reorthonormalize=reorthonormalize)
    B = matmul(A, basis.Q)
    Qb, core = tall_thin_svd(B)
    U = left_singular_vectors(Qb, core)[:, :b]
    V = matmul(basis.Q, core.V)[:, :b]
    svd = SvdResult(U=np.asfortranarray(U), sigma=core.sigma[:b].copy(), V=np.asfortranarray(V))
    error = matrix_norm(A - svd.reconstruct(), "spectral")
    logger.info(f"RSVD of {A.shape[0]}x{A.shape[1]} at rank {b} (q={q}, p={p}): error {error:.3e}")
    return svd, error
