"""
Rank-k error curves and the singular value diagonal study
"""

import logging
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from baselines.cpqr import cpqr_rank_k_approx
from baselines.jacobi import singular_values, svd_rank_k_approx
from baselines.qlp import qlp_rank_k_approx
from dense.core import DenseMatrix, as_dense, matrix_norm
from models.errors import ConfigurationError, ParameterError, SizeLimitError
from models.experiment import ErrorCurve, NormKind
from models.factorizations import CpqrFactorization, QlpFactorization, SvdResult, UTVFactorization
from models.testmatrix import GeneratedMatrix

logger = logging.getLogger(__name__)

Factorization = Union[SvdResult, CpqrFactorization, QlpFactorization, UTVFactorization]


def reference_sigma(matrix: GeneratedMatrix, allow_oracle: bool = True) -> np.ndarray:
    """Known singular values, or the Jacobi oracle's when the family has none"""
    if matrix.known_sigma is not None:
        return np.asarray(matrix.known_sigma)
    if not allow_oracle:
        raise ConfigurationError(f"{matrix.label} has no known singular values")
    try:
        return singular_values(matrix.A)
    except SizeLimitError as e:
        raise ConfigurationError(f"no singular-value reference for {matrix.label}: {e}")


def optimal_error(sigma: np.ndarray, k: int, norm: NormKind = NormKind.SPECTRAL) -> float:
    """||A - A_k^optimal|| by Eckart-Young"""
    tail = np.asarray(sigma)[k:]
    if tail.size == 0:
        return 0.0
    if NormKind(norm) is NormKind.FROBENIUS:
        return float(np.sqrt(np.sum(tail ** 2)))
    return float(tail.max())


def rank_k_approx(F: Factorization, k: int) -> DenseMatrix:
    if isinstance(F, UTVFactorization):
        if not 1 <= k <= min(F.shape):
            raise ParameterError(f"rank {k} outside [1, {min(F.shape)}]")
        return F.rank_k_approx(k)
    if isinstance(F, CpqrFactorization):
        return cpqr_rank_k_approx(F, k)
    if isinstance(F, QlpFactorization):
        return qlp_rank_k_approx(F, k)
    if isinstance(F, SvdResult):
        return svd_rank_k_approx(F, k)
    raise TypeError(f"unsupported factorization {type(F).__name__}")


def explicit_residual_norm(A: DenseMatrix, F: Factorization, k: int,
                           norm: NormKind = NormKind.SPECTRAL) -> float:
    """||A - A_k|| from the assembled rank-k approximant"""
    A = as_dense(A)
    return matrix_norm(A - rank_k_approx(F, k), NormKind(norm).value)


def _trailing_block(F: Factorization, k: int) -> Optional[DenseMatrix]:
    """Block whose norm is the rank-k error, or None when the zero structure is missing"""
    if isinstance(F, UTVFactorization):
        middle, lower = F.T, True
    elif isinstance(F, CpqrFactorization):
        middle, lower = F.R, True
    elif isinstance(F, QlpFactorization):
        middle, lower = F.L, False
    else:
        return None
    # UTV/CPQR need zeros below row k in the first k columns, QLP above row k in the rest
    corner = middle[k:, :k] if lower else middle[:k, k:]
    if np.any(corner != 0.0):
        return None
    return middle[k:, k:]


def factor_error(A: DenseMatrix, F: Factorization, k: int, norm: NormKind = NormKind.SPECTRAL) -> float:
    """e_k through the trailing block, falling back to the explicit residual"""
    if isinstance(F, SvdResult):
        return optimal_error(F.sigma, k, norm)
    block = _trailing_block(F, k)
    if block is None:
        logger.debug(f"Rank {k}: no clean trailing block, using the explicit residual")
        return explicit_residual_norm(A, F, k, norm)
    return matrix_norm(block, NormKind(norm).value)


def error_curve(matrix: GeneratedMatrix, F: Factorization, norm: NormKind, ks: Sequence[int],
                method: Optional[str] = None, sigma: Optional[np.ndarray] = None) -> ErrorCurve:
    """
    Absolute and relative rank-k errors for every k in ``ks``

    Args:
        matrix: The factorized matrix with its reference spectrum
        F: SVD, CPQR, QLP or UTV factorization of matrix.A
        norm: Spectral or Frobenius
        ks: Ranks within [1, min(m, n)]
        method: Label stored in the curve
        sigma: Precomputed reference singular values
    """
    norm = NormKind(norm)
    limit = min(matrix.A.shape)
    bad = [k for k in ks if not 1 <= k <= limit]
    if bad:
        raise ParameterError(f"ranks {bad} outside [1, {limit}]")
    sigma = reference_sigma(matrix) if sigma is None else sigma

    abs_err: List[float] = []
    rel_err: List[Optional[float]] = []
    for k in ks:
        e_k = factor_error(matrix.A, F, k, norm)
        optimal = optimal_error(sigma, k, norm)
        abs_err.append(e_k)
        rel_err.append(100.0 * e_k / optimal if k < limit and optimal > 0.0 else None)

    label = method or type(F).__name__
    return ErrorCurve(method=label, norm=norm, ks=list(ks), abs_err=abs_err, rel_err_pct=rel_err)


def factor_diagonal(F: Factorization) -> np.ndarray:
    """Singular value estimates carried on the middle factor's diagonal"""
    if isinstance(F, UTVFactorization):
        return np.abs(np.diag(F.T))
    if isinstance(F, CpqrFactorization):
        return np.abs(np.diag(F.R))
    if isinstance(F, QlpFactorization):
        return np.abs(np.diag(F.L))
    if isinstance(F, SvdResult):
        return np.asarray(F.sigma)
    raise TypeError(f"unsupported factorization {type(F).__name__}")


def diag_study(matrix: GeneratedMatrix, factorizations: Dict[str, Factorization],
               sigma: Optional[np.ndarray] = None) -> Dict[str, np.ndarray]:
    """
    Relative diagonal errors 100 |t_i - sigma_i| / sigma_i per method

    Entries where sigma_i vanishes are NaN.
    """
    sigma = reference_sigma(matrix) if sigma is None else np.asarray(sigma)
    study = {}
    for label, F in factorizations.items():
        diagonal = factor_diagonal(F)
        r = min(len(diagonal), len(sigma))
        ref = sigma[:r]
        with np.errstate(divide='ignore', invalid='ignore'):
            study[label] = np.where(ref > 0.0, 100.0 * np.abs(diagonal[:r] - ref) / ref, np.nan)
    return study
