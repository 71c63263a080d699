"""
Matrix builders shared by the test modules
"""

import numpy as np

from householder.reflectors import explicit_q, qr_unpivoted


def create_test_matrix(m: int, n: int, seed: int = 0) -> np.ndarray:
    """Gaussian m x n matrix, column-major"""
    return np.asfortranarray(np.random.default_rng(seed).standard_normal((m, n)))


def create_orthonormal(n: int, seed: int = 0) -> np.ndarray:
    return explicit_q(qr_unpivoted(create_test_matrix(n, n, seed))[0])


def create_matrix_with_spectrum(m: int, n: int, sigma, seed: int = 0) -> np.ndarray:
    """U diag(sigma) V^T with random orthonormal U (m x r) and V (n x r)"""
    sigma = np.asarray(sigma, dtype=np.float64)
    r = len(sigma)
    U = create_orthonormal(m, seed)[:, :r]
    V = create_orthonormal(n, seed + 1)[:, :r]
    return np.asfortranarray((U * sigma) @ V.T)


def create_low_rank(m: int, n: int, rank: int, seed: int = 0) -> np.ndarray:
    return create_matrix_with_spectrum(m, n, np.linspace(2.0, 1.0, rank), seed)


