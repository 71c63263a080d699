"""
Simplistic randUTV on explicit dense matrices, used to cross-check the blocked driver
"""

import logging
import math
from typing import Optional

import numpy as np

from baselines.jacobi import jacobi_svd
from baselines.tall_thin import tall_thin_svd
from dense.core import DenseMatrix, as_dense
from householder.reflectors import apply_sequential, qr_unpivoted
from models.errors import ParameterError, UnsupportedShapeError
from models.factorizations import HouseholderFactor, UTVFactorization
from randsample.range_finder import default_reorthonormalize, sample_row_space
from randsample.stream import RandomStream, gaussian_matrix

logger = logging.getLogger(__name__)


def _dense_q(factor: HouseholderFactor) -> DenseMatrix:
    return apply_sequential(factor, False, np.eye(factor.m, order='F'))


def _block_diag(head: DenseMatrix, size: int) -> DenseMatrix:
    out = np.eye(size, order='F')
    k = head.shape[0]
    out[:k, :k] = head
    return out


def _dense_step(A: DenseMatrix, b: int, q: int, stream: RandomStream, reorthonormalize: bool):
    """[UU, TT, VV] = stepUTV(A, b, q) with every orthogonal factor formed explicitly"""
    m, n = A.shape
    G = gaussian_matrix(stream, m, b)
    Y = sample_row_space(A, G, q, reorthonormalize)
    Vfac, _ = qr_unpivoted(Y)
    V = _dense_q(Vfac)
    AV = A @ V
    Ufac, R = qr_unpivoted(AV[:, :b])
    U = _dense_q(Ufac)
    core = jacobi_svd(R)
    U = U @ _block_diag(core.U, m)
    V = V @ _block_diag(core.V, n)
    T = U.T @ A @ V
    T[b:, :b] = 0.0
    T[:b, :b] = np.diag(core.sigma)
    return U, T, V


def _dense_svd(A: DenseMatrix):
    """Full SVD of a tall or square trailing block: U (m x m), D (m x n), V (n x n)"""
    m, n = A.shape
    if m > n:
        Qfac, core = tall_thin_svd(A)
        U = _dense_q(Qfac) @ _block_diag(core.U, m)
    else:
        core = jacobi_svd(A)
        U = core.U
    D = np.zeros((m, n), order='F')
    D[:n, :n] = np.diag(core.sigma)
    return U, D, core.V


def rand_utv_reference(A: DenseMatrix, b: int, q: int, stream: RandomStream,
                       reorthonormalize: Optional[bool] = None) -> UTVFactorization:
    """
    randUTV by full-size dense products, for m >= n

    Consumes the random stream exactly as ``rand_utv`` with p = 0 does.
    """
    T = as_dense(A, copy=True)
    m, n = T.shape
    if m < n:
        raise UnsupportedShapeError(f"reference randUTV assumes m >= n, got {m}x{n}")
    if b < 1 or q < 0:
        raise ParameterError(f"invalid parameters b={b}, q={q}")
    if reorthonormalize is None:
        reorthonormalize = default_reorthonormalize()

    U = np.eye(m, order='F')
    V = np.eye(n, order='F')
    nsteps = math.ceil(n / b)
    for i in range(nsteps):
        s = i * b
        if n - s > b:
            UU, TT, VV = _dense_step(T[s:, s:], b, q, stream, reorthonormalize)
        else:
            UU, TT, VV = _dense_svd(T[s:, s:])
        U[:, s:] = U[:, s:] @ UU
        V[:, s:] = V[:, s:] @ VV
        T[s:, s:] = TT
        T[:s, s:] = T[:s, s:] @ VV

    logger.debug(f"Reference randUTV on {m}x{n} finished after {nsteps} steps")
    return UTVFactorization(U=U, T=T, V=V, block_size=b, power=q, oversampling=0,
                            seed=stream.seed, reorthonormalize=reorthonormalize, steps=nsteps)
