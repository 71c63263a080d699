"""
Column-pivoted Householder QR with downdated column norms
"""

import logging
from typing import Optional

import numpy as np

from config.loader import config_loader
from dense.core import DenseMatrix, as_dense, record_flops
from householder.reflectors import apply_left, householder_vector
from models.errors import ParameterError
from models.factorizations import CpqrFactorization, HouseholderFactor

logger = logging.getLogger(__name__)


def cpqr(A: DenseMatrix, recompute_ratio: Optional[float] = None) -> CpqrFactorization:
    """
    A[:, perm] = Q R with |R(1,1)| >= |R(2,2)| >= ...

    At step j the remaining column of largest trailing norm is pivoted in, ties going
    to the lowest index. Trailing norms are downdated and recomputed exactly once the
    squared norm drops below ``recompute_ratio`` times its value at the start.

    Args:
        A: m x n matrix
        recompute_ratio: Downdating guard (settings ``cpqr.norm_recompute_ratio`` when omitted)

    Returns:
        CpqrFactorization with R of size m x n
    """
    if recompute_ratio is None:
        recompute_ratio = float(config_loader.get_cpqr_config().get('norm_recompute_ratio', 1e-8))

    work = as_dense(A, copy=True)
    m, n = work.shape
    k = min(m, n)
    perm = np.arange(n)
    vectors = np.zeros((m, k), order='F')
    tau = np.zeros(k)

    norms = np.einsum('ij,ij->j', work, work)
    reference = norms.copy()
    recomputed = 0

    for j in range(k):
        p = j + int(np.argmax(norms[j:]))
        if p != j:
            work[:, [j, p]] = work[:, [p, j]]
            perm[[j, p]] = perm[[p, j]]
            norms[[j, p]] = norms[[p, j]]
            reference[[j, p]] = reference[[p, j]]

        t, v, mu = householder_vector(work[j:, j])
        vectors[j:, j] = v
        tau[j] = t
        if t != 0.0 and j + 1 < n:
            trailing = work[j:, j + 1:]
            trailing -= t * np.outer(v, v @ trailing)
            record_flops(4 * (m - j) * (n - j - 1))
        work[j, j] = mu
        work[j + 1:, j] = 0.0

        if j + 1 < n:
            norms[j + 1:] -= work[j, j + 1:] ** 2
            stale = np.flatnonzero(norms[j + 1:] <= recompute_ratio * reference[j + 1:]) + j + 1
            if stale.size:
                norms[stale] = np.einsum('ij,ij->j', work[j + 1:, stale], work[j + 1:, stale])
                reference[stale] = norms[stale]
                recomputed += stale.size

    logger.debug(f"CPQR of {m}x{n}: {recomputed} column norms recomputed")
    R = np.asfortranarray(np.triu(work))
    Q = HouseholderFactor(m=m, b=k, vectors=vectors, tau=tau)
    return CpqrFactorization(Q=Q, R=R, perm=perm)


def cpqr_rank_k_approx(F: CpqrFactorization, k: int) -> DenseMatrix:
    """A_k = Q(:,1:k) R(1:k,:) P^T"""
    m, n = F.R.shape
    if not 1 <= k <= min(m, n):
        raise ParameterError(f"rank {k} outside [1, {min(m, n)}]")
    head = np.zeros((m, n), order='F')
    head[:k, :] = F.R[:k, :]
    product = apply_left(F.Q, False, head)
    approx = np.zeros((m, n), order='F')
    approx[:, F.perm] = product
    return approx
