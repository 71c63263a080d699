"""
Two-step SVD of a tall-thin block: unpivoted QR, then an exact SVD of the small triangle
"""

import logging
from typing import Tuple

import numpy as np

from baselines.jacobi import jacobi_svd
from dense.core import DenseMatrix, as_dense
from householder.reflectors import apply_left, qr_unpivoted
from models.errors import UnsupportedShapeError
from models.factorizations import HouseholderFactor, SvdResult

logger = logging.getLogger(__name__)


def tall_thin_svd(B: DenseMatrix) -> Tuple[HouseholderFactor, SvdResult]:
    """
    B = Q [U_s diag(sigma) V_s^T; 0]

    Args:
        B: m x b matrix with m >= b

    Returns:
        (Q, core) where core is the SVD of the b x b triangular factor
    """
    B = as_dense(B)
    m, b = B.shape
    if m < b:
        raise UnsupportedShapeError(f"tall_thin_svd needs m >= b, got {m}x{b}")
    Q, R = qr_unpivoted(B)
    core = jacobi_svd(R)
    logger.debug(f"Tall-thin SVD of {m}x{b}: sigma_1={core.sigma[0] if b else 0.0:.3e}")
    return Q, core


def left_singular_vectors(Q: HouseholderFactor, core: SvdResult) -> DenseMatrix:
    """Explicit m x b left factor Q [U_s; 0]"""
    padded = np.zeros((Q.m, core.U.shape[1]), order='F')
    padded[:core.U.shape[0], :] = core.U
    return apply_left(Q, False, padded)
