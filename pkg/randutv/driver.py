"""
Blocked randUTV driver working in place on T with WY updates
"""

import logging
import math
from typing import Optional

import numpy as np

from baselines.jacobi import jacobi_svd
from baselines.tall_thin import tall_thin_svd
from config.loader import config_loader
from dense.core import DenseMatrix, as_dense, matmul
from householder.reflectors import apply_left, apply_right, qr_unpivoted
from models.errors import ParameterError
from models.factorizations import UTVFactorization
from randsample.range_finder import sample_row_space
from randsample.stream import RandomStream, gaussian_matrix
from randutv.step import reduce_sample

logger = logging.getLogger(__name__)


class RandUTV:
    """
    Drives the block sweep of randUTV over a working copy of A.

    Step i acts on the trailing block T([I2, I3], [J2, J3]); once I3 or J3 is empty the
    remaining block is diagonalized by an exact SVD.
    """

    def __init__(self, A: DenseMatrix, b: int, q: int, p: int, stream: RandomStream,
                 build_ortho: bool, reorthonormalize: bool, stop_tolerance: Optional[float]):
        self.T = as_dense(A, copy=True)
        self.m, self.n = self.T.shape
        self.b = b
        self.q = q
        self.p = p
        self.stream = stream
        self.reorthonormalize = reorthonormalize
        self.stop_tolerance = stop_tolerance
        self.U = np.eye(self.m, order='F') if build_ortho else None
        self.V = np.eye(self.n, order='F') if build_ortho else None
        self.steps = 0
        self.stopped_early = False

    def run(self) -> UTVFactorization:
        nsteps = min(math.ceil(self.m / self.b), math.ceil(self.n / self.b))
        for i in range(nsteps):
            r0 = c0 = i * self.b
            r1 = min(r0 + self.b, self.m)
            c1 = min(c0 + self.b, self.n)
            if r1 < self.m and c1 < self.n:
                self._randomized_step(r0, c0, r1, c1)
                self.steps += 1
                if self._should_stop(r1, c1):
                    self.stopped_early = True
                    logger.info(f"randUTV stopped after step {self.steps}: "
                                f"T({r1},{c1}) below {self.stop_tolerance} * T(1,1)")
                    break
            else:
                self._final_block(r0, c0)
                self.steps += 1

        return UTVFactorization(
            U=self.U, T=self.T, V=self.V, block_size=self.b, power=self.q,
            oversampling=self.p, seed=self.stream.seed, reorthonormalize=self.reorthonormalize,
            steps=self.steps, stopped_early=self.stopped_early,
        )

    def _should_stop(self, r1: int, c1: int) -> bool:
        if self.stop_tolerance is None:
            return False
        return self.T[r1 - 1, c1 - 1] <= self.stop_tolerance * self.T[0, 0]

    def _oversampling(self, c0: int) -> int:
        room = (self.n - c0) - self.b
        if self.p > room:
            logger.warning(f"Oversampling p={self.p} clamped to {room} at column {c0 + 1}")
            return room
        return self.p

    def _randomized_step(self, r0: int, c0: int, r1: int, c1: int) -> None:
        T, U, V, b = self.T, self.U, self.V, self.b
        p = self._oversampling(c0)

        G = gaussian_matrix(self.stream, self.m - r0, b + p)
        Y = sample_row_space(T[r0:, c0:], G, self.q, self.reorthonormalize)
        if p:
            Y = reduce_sample(Y, b)

        Vfac, _ = qr_unpivoted(Y)
        T[:, c0:] = apply_right(Vfac, False, T[:, c0:])
        if V is not None:
            V[:, c0:] = apply_right(Vfac, False, V[:, c0:])

        Ufac, R = qr_unpivoted(T[r0:, c0:c1])
        T[r0:, c1:] = apply_left(Ufac, True, T[r0:, c1:])
        if U is not None:
            U[:, r0:] = apply_right(Ufac, False, U[:, r0:])

        core = jacobi_svd(R)
        T[r0:, c0:c1] = 0.0
        T[r0:r1, c0:c1] = np.diag(core.sigma)
        T[r0:r1, c1:] = matmul(core.U, T[r0:r1, c1:], trans_a=True)
        if r0:
            T[:r0, c0:c1] = matmul(T[:r0, c0:c1], core.V)
        if U is not None:
            U[:, r0:r1] = matmul(U[:, r0:r1], core.U)
            V[:, c0:c1] = matmul(V[:, c0:c1], core.V)

        if core.sigma[-1] == 0.0:
            logger.warning(f"Rank-deficient block at step {self.steps + 1}")
        logger.debug(f"randUTV step {self.steps + 1}: diag head {core.sigma[0]:.3e}, tail {core.sigma[-1]:.3e}")

    def _final_block(self, r0: int, c0: int) -> None:
        T, U, V = self.T, self.U, self.V
        block = T[r0:, c0:]
        mb, nb = block.shape

        if mb > nb:
            Qfac, core = tall_thin_svd(block)
            T[r0:, c0:] = 0.0
            T[r0:r0 + nb, c0:] = np.diag(core.sigma)
            if r0:
                T[:r0, c0:] = matmul(T[:r0, c0:], core.V)
            if U is not None:
                U[:, r0:] = apply_right(Qfac, False, U[:, r0:])
                U[:, r0:r0 + nb] = matmul(U[:, r0:r0 + nb], core.U)
                V[:, c0:] = matmul(V[:, c0:], core.V)
        elif mb < nb:
            # rows are reduced by a QR of the transposed block
            Qfac, core = tall_thin_svd(block.T)
            T[r0:, c0:] = 0.0
            T[r0:, c0:c0 + mb] = np.diag(core.sigma)
            if r0:
                T[:r0, c0:] = apply_right(Qfac, False, T[:r0, c0:])
                T[:r0, c0:c0 + mb] = matmul(T[:r0, c0:c0 + mb], core.U)
            if U is not None:
                U[:, r0:] = matmul(U[:, r0:], core.V)
                V[:, c0:] = apply_right(Qfac, False, V[:, c0:])
                V[:, c0:c0 + mb] = matmul(V[:, c0:c0 + mb], core.U)
        else:
            core = jacobi_svd(block)
            T[r0:, c0:] = np.diag(core.sigma)
            if r0:
                T[:r0, c0:] = matmul(T[:r0, c0:], core.V)
            if U is not None:
                U[:, r0:] = matmul(U[:, r0:], core.U)
                V[:, c0:] = matmul(V[:, c0:], core.V)


def _resolve(value, key: str, fallback):
    if value is not None:
        return value
    return config_loader.get_randutv_config().get(key, fallback)


def rand_utv(A: DenseMatrix, b: Optional[int] = None, q: Optional[int] = None, p: Optional[int] = None,
             stream: Optional[RandomStream] = None, build_ortho: Optional[bool] = None,
             reorthonormalize: Optional[bool] = None, stop_tolerance: Optional[float] = None,
             seed: int = 0) -> UTVFactorization:
    """
    Blocked randomized UTV factorization A = U T V^T

    Args:
        A: m x n matrix
        b: Block size (settings ``randutv.block_size`` when omitted)
        q: Power iteration count
        p: Oversampling per step; clamped to the remaining columns minus b
        stream: Random stream; a fresh one from ``seed`` when omitted
        build_ortho: Accumulate U and V; T alone is returned when False
        reorthonormalize: Stabilize power iteration between applications
        stop_tolerance: Halt once T(bi, bi) <= stop_tolerance * T(1, 1)

    Returns:
        UTVFactorization
    """
    b = int(_resolve(b, 'block_size', 50))
    q = int(_resolve(q, 'power_iterations', 2))
    p = int(_resolve(p, 'oversampling', 0))
    build_ortho = bool(_resolve(build_ortho, 'build_ortho', True))
    reorthonormalize = bool(_resolve(reorthonormalize, 'reorthonormalize', True))
    stop_tolerance = _resolve(stop_tolerance, 'stop_tolerance', None)
    stream = stream if stream is not None else RandomStream(seed)

    A = as_dense(A)
    m, n = A.shape
    if m < 1 or n < 1:
        raise ParameterError(f"rand_utv needs a non-empty matrix, got {m}x{n}")
    if b < 1 or q < 0 or p < 0:
        raise ParameterError(f"invalid parameters b={b}, q={q}, p={p}")

    logger.info(f"randUTV on {m}x{n}: b={b}, q={q}, p={p}, seed={stream.seed:#x}, build_ortho={build_ortho}")
    driver = RandUTV(A, b, q, p, stream, build_ortho, reorthonormalize,
                     None if stop_tolerance is None else float(stop_tolerance))
    result = driver.run()
    logger.info(f"randUTV on {m}x{n} finished after {result.steps} steps")
    return result


def truncate(F: UTVFactorization, k: int) -> DenseMatrix:
    """Rank-k approximant U(:,1:k) T(1:k,:) V^T"""
    if not 1 <= k <= min(F.shape):
        raise ParameterError(f"rank {k} outside [1, {min(F.shape)}]")
    return F.rank_k_approx(k)
