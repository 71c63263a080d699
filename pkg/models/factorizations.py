"""
Result models for the factorizations computed by the toolkit
"""

from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class _ArrayModel(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class HouseholderFactor(_ArrayModel):
    """
    Product Q = H_1 H_2 ... H_b of Householder reflectors H_j = I - tau_j v_j v_j^T.

    Column j of ``vectors`` holds v_j: zeros above row j, a unit entry in row j.
    ``W`` (m x b) and ``Y`` (b x m) are the cached WY blocks with Q = I + W Y.
    """
    m: int = Field(ge=0)
    b: int = Field(ge=0)
    vectors: np.ndarray
    tau: np.ndarray
    W: Optional[np.ndarray] = None
    Y: Optional[np.ndarray] = None

    @property
    def has_wy(self) -> bool:
        return self.W is not None and self.Y is not None


class SvdResult(_ArrayModel):
    """A = U diag(sigma) V^T with sigma non-increasing and non-negative"""
    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    def reconstruct(self) -> np.ndarray:
        r = len(self.sigma)
        return (self.U[:, :r] * self.sigma) @ self.V[:, :r].T


class CpqrFactorization(_ArrayModel):
    """
    Column-pivoted QR, A[:, perm] = Q R.

    ``perm`` holds 0-based column indices; ``R`` is m x n upper triangular.
    """
    Q: HouseholderFactor
    R: np.ndarray
    perm: np.ndarray

    @property
    def perm_one_based(self) -> Tuple[int, ...]:
        return tuple(int(p) + 1 for p in self.perm)

    def permutation_matrix(self) -> np.ndarray:
        n = len(self.perm)
        P = np.zeros((n, n), order='F')
        P[self.perm, np.arange(n)] = 1.0
        return P


class QlpFactorization(_ArrayModel):
    """A = U L V^T with L lower triangular"""
    U: np.ndarray
    L: np.ndarray
    V: np.ndarray


class RangeBasis(_ArrayModel):
    """Orthonormal basis for the sampled row space of A"""
    Q: np.ndarray
    q_used: int = Field(ge=0)
    b: int = Field(ge=1)


class StepResult(_ArrayModel):
    """Single randUTV step A = U T V^T with the leading b x b block of T diagonal"""
    U: np.ndarray
    T: np.ndarray
    V: np.ndarray
    b: int = Field(ge=1)

    @property
    def T11(self) -> np.ndarray:
        return self.T[:self.b, :self.b]

    @property
    def T12(self) -> np.ndarray:
        return self.T[:self.b, self.b:]

    @property
    def T21(self) -> np.ndarray:
        return self.T[self.b:, :self.b]

    @property
    def T22(self) -> np.ndarray:
        return self.T[self.b:, self.b:]


class UTVFactorization(_ArrayModel):
    """
    A = U T V^T with T upper triangular and each b x b diagonal block of T diagonal.

    ``U`` and ``V`` are None when the orthonormal factors were not accumulated. When
    ``stopped_early`` is set only the leading ``steps`` blocks are reduced: the trailing
    block past them is left as the sweep found it, so T is not triangular there, while
    A = U T V^T still holds.
    """
    U: Optional[np.ndarray]
    T: np.ndarray
    V: Optional[np.ndarray]
    block_size: int = Field(ge=1)
    power: int = Field(ge=0)
    oversampling: int = Field(default=0, ge=0)
    seed: int = Field(ge=0)
    reorthonormalize: bool = True
    steps: int = 0
    stopped_early: bool = False

    @property
    def shape(self) -> Tuple[int, int]:
        return self.T.shape

    def diagonal(self) -> np.ndarray:
        return np.diag(self.T).copy()

    def rank_k_approx(self, k: int) -> np.ndarray:
        """A_k = U(:,1:k) T(1:k,:) V^T"""
        if self.U is None or self.V is None:
            raise ValueError("rank-k approximant needs the orthonormal factors (build_ortho=True)")
        return self.U[:, :k] @ self.T[:k, :] @ self.V.T
