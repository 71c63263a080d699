"""
One-sided Jacobi SVD, the exact oracle behind spectral norms and optimal errors
"""

import logging
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from config.loader import config_loader
from dense.core import DenseMatrix, as_dense, record_flops
from householder.reflectors import explicit_q, qr_unpivoted
from models.errors import ParameterError, SizeLimitError
from models.factorizations import SvdResult

logger = logging.getLogger(__name__)

EPS = np.finfo(np.float64).eps


@lru_cache(maxsize=64)
def _round_robin(n: int) -> Tuple[Tuple[np.ndarray, np.ndarray], ...]:
    """
    Tournament schedule over n columns: every pair appears once per sweep,
    the pairs of a round are disjoint so they can be rotated together.
    """
    players = list(range(n + n % 2))
    size = len(players)
    rounds: List[Tuple[np.ndarray, np.ndarray]] = []
    for _ in range(size - 1):
        pairs = [
            (min(players[i], players[size - 1 - i]), max(players[i], players[size - 1 - i]))
            for i in range(size // 2)
            if players[i] < n and players[size - 1 - i] < n
        ]
        if pairs:
            left = np.array([p[0] for p in pairs], dtype=np.intp)
            right = np.array([p[1] for p in pairs], dtype=np.intp)
            rounds.append((left, right))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _orthogonalize(work: DenseMatrix, V: Optional[DenseMatrix], tol: float, max_sweeps: int) -> int:
    """Rotate column pairs of ``work`` (and V) until all pairs are numerically orthogonal"""
    m, n = work.shape
    rounds = _round_robin(n)

    for sweep in range(1, max_sweeps + 1):
        rotated = 0
        for left, right in rounds:
            x = work[:, left]
            y = work[:, right]
            alpha = np.einsum('ij,ij->j', x, x)
            beta = np.einsum('ij,ij->j', y, y)
            gamma = np.einsum('ij,ij->j', x, y)
            active = np.abs(gamma) > tol * np.sqrt(alpha) * np.sqrt(beta)
            record_flops(6 * m * len(left))
            if not active.any():
                continue

            li, ri = left[active], right[active]
            x, y = x[:, active], y[:, active]
            a, b, g = alpha[active], beta[active], gamma[active]
            zeta = (b - a) / (2.0 * g)
            t = np.where(zeta >= 0.0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(1.0, zeta))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t

            work[:, li] = c * x - s * y
            work[:, ri] = s * x + c * y
            if V is not None:
                vx, vy = V[:, li], V[:, ri]
                V[:, li] = c * vx - s * vy
                V[:, ri] = s * vx + c * vy
                record_flops(6 * V.shape[0] * len(li))
            record_flops(6 * m * len(li))
            rotated += len(li)

        logger.debug(f"Jacobi sweep {sweep}: {rotated} rotations on {m}x{n}")
        if rotated == 0:
            return sweep

    logger.warning(f"Jacobi SVD reached the sweep cap ({max_sweeps}) on a {m}x{n} matrix")
    return max_sweeps


def _settings(tol: Optional[float], max_sweeps: Optional[int], m: int) -> Tuple[float, int]:
    cfg = config_loader.get_jacobi_config()
    tol = float(cfg.get('tolerance', 1e-14)) if tol is None else tol
    max_sweeps = int(cfg.get('max_sweeps', 30)) if max_sweeps is None else max_sweeps
    return max(tol, m * EPS), max_sweeps


def _check_cap(A: DenseMatrix) -> None:
    cap = config_loader.get_desk_cap()
    if min(A.shape) > cap:
        raise SizeLimitError(
            f"exact SVD of a {A.shape[0]}x{A.shape[1]} matrix exceeds the desk-scale cap {cap}"
        )


def _complete_basis(U: DenseMatrix, filled: np.ndarray) -> None:
    """Replace the columns of U not flagged in ``filled`` by an orthonormal complement"""
    m = U.shape[0]
    missing = np.flatnonzero(~filled)
    if not filled.any():
        U[:, missing] = np.eye(m, len(missing))
        return
    factor, _ = qr_unpivoted(U[:, filled])
    full = explicit_q(factor)
    U[:, missing] = full[:, factor.b:factor.b + len(missing)]


def jacobi_svd(A: DenseMatrix, tol: Optional[float] = None, max_sweeps: Optional[int] = None) -> SvdResult:
    """
    Thin SVD A = U diag(sigma) V^T by one-sided Jacobi

    Args:
        A: m x n matrix with min(m, n) at most the desk-scale cap
        tol: Pairwise cosine threshold (settings ``jacobi.tolerance`` when omitted)
        max_sweeps: Sweep cap (settings ``jacobi.max_sweeps`` when omitted)

    Returns:
        SvdResult with U m x r, V n x r, r = min(m, n); sigma non-increasing; the largest
        entry of every U column is non-negative
    """
    A = as_dense(A)
    _check_cap(A)
    m, n = A.shape
    if m < n:
        flipped = jacobi_svd(A.T, tol=tol, max_sweeps=max_sweeps)
        U, V = np.asfortranarray(flipped.V), np.asfortranarray(flipped.U)
        sigma = flipped.sigma
        _canonicalize_signs(U, V)
        return SvdResult(U=U, sigma=sigma, V=V)

    work = np.array(A, order='F', copy=True)
    V = np.eye(n, order='F')
    if n > 0:
        tol, max_sweeps = _settings(tol, max_sweeps, m)
        _orthogonalize(work, V, tol, max_sweeps)

    sigma = np.linalg.norm(work, axis=0)
    order = np.argsort(-sigma, kind='stable')
    sigma = sigma[order]
    work = work[:, order]
    V = np.asfortranarray(V[:, order])

    nonzero = sigma > np.finfo(np.float64).tiny
    U = np.zeros((m, n), order='F')
    U[:, nonzero] = work[:, nonzero] / sigma[nonzero]
    sigma[~nonzero] = 0.0
    if not nonzero.all():
        _complete_basis(U, nonzero)

    _canonicalize_signs(U, V)
    return SvdResult(U=U, sigma=sigma, V=V)


def _canonicalize_signs(U: DenseMatrix, V: DenseMatrix) -> None:
    if U.shape[1] == 0:
        return
    lead = np.argmax(np.abs(U), axis=0)
    flip = U[lead, np.arange(U.shape[1])] < 0.0
    U[:, flip] *= -1.0
    V[:, flip] *= -1.0


def singular_values(A: DenseMatrix, tol: Optional[float] = None, max_sweeps: Optional[int] = None) -> np.ndarray:
    """Singular values only, non-increasing (V is not accumulated)"""
    A = as_dense(A)
    _check_cap(A)
    if A.shape[0] < A.shape[1]:
        A = A.T
    m, n = A.shape
    if n == 0:
        return np.zeros(0)
    work = np.array(A, order='F', copy=True)
    tol, max_sweeps = _settings(tol, max_sweeps, m)
    _orthogonalize(work, None, tol, max_sweeps)
    return np.sort(np.linalg.norm(work, axis=0))[::-1].copy()


def svd_rank_k_approx(svd: SvdResult, k: int) -> DenseMatrix:
    """Optimal rank-k approximant U(:,1:k) diag(sigma(1:k)) V(:,1:k)^T"""
    if not 0 <= k <= len(svd.sigma):
        raise ParameterError(f"rank {k} outside [0, {len(svd.sigma)}]")
    return np.asfortranarray((svd.U[:, :k] * svd.sigma[:k]) @ svd.V[:, :k].T)
