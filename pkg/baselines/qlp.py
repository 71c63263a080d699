"""
Stewart's QLP: CPQR of A followed by CPQR of the transposed triangular factor
"""

import logging

import numpy as np

from baselines.cpqr import cpqr
from dense.core import DenseMatrix, as_dense
from householder.reflectors import explicit_q
from models.errors import ParameterError
from models.factorizations import QlpFactorization

logger = logging.getLogger(__name__)


def qlp(A: DenseMatrix) -> QlpFactorization:
    """
    A = U L V^T with L lower triangular

    A P1 = Q1 R1 and R1^T P2 = Q2 R2 give L = R2^T, U = Q1 P2, V = P1 Q2.
    """
    A = as_dense(A)
    m, n = A.shape
    first = cpqr(A)
    second = cpqr(first.R.T)

    L = np.asfortranarray(second.R.T)
    U = np.asfortranarray(explicit_q(first.Q)[:, second.perm])
    V = np.zeros((n, n), order='F')
    V[first.perm, :] = explicit_q(second.Q)

    logger.debug(f"QLP of {m}x{n} done")
    return QlpFactorization(U=U, L=L, V=V)


def qlp_rank_k_approx(F: QlpFactorization, k: int) -> DenseMatrix:
    """A_k = U L(:,1:k) V(:,1:k)^T"""
    m, n = F.L.shape
    if not 1 <= k <= min(m, n):
        raise ParameterError(f"rank {k} outside [1, {min(m, n)}]")
    return np.asfortranarray(F.U @ F.L[:, :k] @ F.V[:, :k].T)
