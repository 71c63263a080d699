"""
Identities linking a randUTV step to the range finder sharing its Gaussian draw
"""

import logging
from typing import NamedTuple, Optional

from dense.core import DenseMatrix, as_dense, matmul, spectral_norm
from models.errors import ParameterError
from randsample.range_finder import default_reorthonormalize, orthonormalize, sample_row_space
from randsample.stream import RandomStream, gaussian_matrix
from randutv.step import step_from_sample

logger = logging.getLogger(__name__)


class TheoremNorms(NamedTuple):
    """
    lhs_a = ||A - A Q Q^T||, rhs_a = ||[T12; T22]||,
    lhs_b = ||A - W W^T A||, rhs_b = ||T22||  (spectral norms)
    """
    lhs_a: float
    rhs_a: float
    lhs_b: float
    rhs_b: float

    @property
    def gap_a(self) -> float:
        return abs(self.lhs_a - self.rhs_a)

    @property
    def gap_b(self) -> float:
        return abs(self.lhs_b - self.rhs_b)


def verify_theorem(A: DenseMatrix, b: int, q: int, stream: RandomStream,
                   reorthonormalize: Optional[bool] = None) -> TheoremNorms:
    """
    Compute both sides of the two step identities from ONE Gaussian draw

    Q is the range-finder basis of Y = (A^T A)^q A^T G, W an orthonormal basis of A Y,
    and T the step_utv output built from the same Y.
    """
    A = as_dense(A)
    m, n = A.shape
    if not 1 <= b < min(m, n):
        raise ParameterError(f"b={b} must satisfy 1 <= b < min(m, n) = {min(m, n)}")
    if reorthonormalize is None:
        reorthonormalize = default_reorthonormalize()

    G = gaussian_matrix(stream, m, b)
    Y = sample_row_space(A, G, q, reorthonormalize)

    Q = orthonormalize(Y)
    lhs_a = spectral_norm(A - matmul(matmul(A, Q), Q, trans_b=True))

    step = step_from_sample(A, Y, b)
    rhs_a = spectral_norm(step.T[:, b:])
    rhs_b = spectral_norm(step.T22)

    W = orthonormalize(matmul(A, Y))
    lhs_b = spectral_norm(A - matmul(W, matmul(W, A, trans_a=True)))

    norms = TheoremNorms(lhs_a=lhs_a, rhs_a=rhs_a, lhs_b=lhs_b, rhs_b=rhs_b)
    logger.info(f"Theorem check {m}x{n}, b={b}, q={q}: gap_a={norms.gap_a:.2e}, gap_b={norms.gap_b:.2e}")
    return norms
