"""
Column-major dense matrix kernels: blocked gemm, norms, views and flop accounting
"""

import logging
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional, Tuple

import numpy as np
import numpy.typing as npt

from config.loader import config_loader
from models.errors import DimensionMismatchError, NonFiniteInputError

logger = logging.getLogger(__name__)

# Fortran-ordered float64 array; element (i, j) (1-based) lives at data[(j-1)*rows + (i-1)]
DenseMatrix = npt.NDArray[np.float64]


def as_dense(values, copy: bool = False, check_finite: bool = True) -> DenseMatrix:
    """
    Normalize an array-like into a column-major float64 matrix

    Args:
        values: Anything numpy can turn into a 1-D or 2-D real array
        copy: Force a fresh buffer even if the input already qualifies
        check_finite: Reject NaN/Inf entries

    Returns:
        Fortran-ordered float64 array (1-D input becomes a column)
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got an array with {arr.ndim} dimensions")
    arr = np.array(arr, order='F', copy=True) if copy else np.asfortranarray(arr)
    if check_finite and not np.all(np.isfinite(arr)):
        raise NonFiniteInputError(f"{arr.shape[0]}x{arr.shape[1]} matrix contains NaN or Inf entries")
    return arr


def from_column_major(data, rows: int, cols: int) -> DenseMatrix:
    """Build a matrix from a flat column-major value sequence"""
    flat = np.asarray(data, dtype=np.float64).ravel()
    if flat.size != rows * cols:
        raise DimensionMismatchError(f"{flat.size} values cannot fill a {rows}x{cols} matrix")
    return as_dense(flat.reshape((rows, cols), order='F'), copy=True)


def entry(A: DenseMatrix, i: int, j: int) -> float:
    """Element (i, j) with 1-based indexing"""
    _check_index(A, i, j)
    return float(A[i - 1, j - 1])


def set_entry(A: DenseMatrix, i: int, j: int, value: float) -> None:
    _check_index(A, i, j)
    A[i - 1, j - 1] = value


def _check_index(A: DenseMatrix, i: int, j: int) -> None:
    rows, cols = A.shape
    if not (1 <= i <= rows and 1 <= j <= cols):
        raise IndexError(f"entry ({i},{j}) outside a {rows}x{cols} matrix")


class MatrixView:
    """
    Contiguous submatrix B(I, J) of a parent matrix, 1-based inclusive ranges.

    The view aliases the parent storage: writes through it are visible in the parent.
    """

    def __init__(self, parent: DenseMatrix, rows: Tuple[int, int], cols: Tuple[int, int]):
        m, n = parent.shape
        (i1, i2), (j1, j2) = rows, cols
        if not (1 <= i1 <= i2 + 1 and i2 <= m and 1 <= j1 <= j2 + 1 and j2 <= n):
            raise DimensionMismatchError(
                f"view rows {i1}:{i2}, cols {j1}:{j2} do not fit a {m}x{n} parent"
            )
        self.parent = parent
        self.rows = (i1, i2)
        self.cols = (j1, j2)

    @property
    def array(self) -> DenseMatrix:
        (i1, i2), (j1, j2) = self.rows, self.cols
        return self.parent[i1 - 1:i2, j1 - 1:j2]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.array.shape

    def get(self, i: int, j: int) -> float:
        return entry(self.array, i, j)

    def set(self, i: int, j: int, value: float) -> None:
        set_entry(self.array, i, j, value)

    def assign(self, block) -> None:
        block = np.asarray(block, dtype=np.float64)
        if block.shape != self.shape:
            raise DimensionMismatchError(f"cannot assign a {block.shape} block to a {self.shape} view")
        self.array[...] = block


class FlopCounter:
    """Accumulates floating point operations recorded by the kernels"""

    def __init__(self):
        self.flops = 0


_active_counters: ContextVar[Tuple[FlopCounter, ...]] = ContextVar("flop_counters", default=())


@contextmanager
def count_flops() -> Iterator[FlopCounter]:
    """Count flops performed by kernels called inside the block"""
    counter = FlopCounter()
    token = _active_counters.set(_active_counters.get() + (counter,))
    try:
        yield counter
    finally:
        _active_counters.reset(token)


def record_flops(flops: int) -> None:
    for counter in _active_counters.get():
        counter.flops += int(flops)


def gemm(alpha: float, A: DenseMatrix, trans_a: bool, B: DenseMatrix, trans_b: bool,
         beta: float, C: DenseMatrix, tile: Optional[int] = None) -> DenseMatrix:
    """
    C <- alpha * op(A) @ op(B) + beta * C, computed tile by tile

    Args:
        alpha, beta: Scalars
        A, B: Operands; ``trans_a``/``trans_b`` select the transpose
        C: Output, updated in place; must not alias A or B
        tile: Cache tile edge (settings ``dense.gemm_tile`` when omitted)

    Returns:
        C
    """
    op_a = A.T if trans_a else A
    op_b = B.T if trans_b else B
    m, k = op_a.shape
    k_b, n = op_b.shape
    if k != k_b or C.shape != (m, n):
        raise DimensionMismatchError(
            f"gemm: op(A) is {m}x{k}, op(B) is {k_b}x{n}, C is {C.shape[0]}x{C.shape[1]}"
        )
    tile = tile or config_loader.get_gemm_tile()

    if beta == 0.0:
        C[...] = 0.0
    elif beta != 1.0:
        C *= beta
    if alpha == 0.0 or k == 0 or m == 0 or n == 0:
        return C

    for j0 in range(0, n, tile):
        j1 = min(j0 + tile, n)
        for i0 in range(0, m, tile):
            i1 = min(i0 + tile, m)
            block = C[i0:i1, j0:j1]
            for p0 in range(0, k, tile):
                p1 = min(p0 + tile, k)
                product = op_a[i0:i1, p0:p1] @ op_b[p0:p1, j0:j1]
                if alpha != 1.0:
                    product *= alpha
                block += product

    record_flops(2 * m * n * k)
    return C


def matmul(A: DenseMatrix, B: DenseMatrix, trans_a: bool = False, trans_b: bool = False) -> DenseMatrix:
    """op(A) @ op(B) into a fresh column-major matrix"""
    m = A.shape[1] if trans_a else A.shape[0]
    n = B.shape[0] if trans_b else B.shape[1]
    C = np.zeros((m, n), order='F')
    return gemm(1.0, A, trans_a, B, trans_b, 0.0, C)


def frobenius_norm(A: DenseMatrix) -> float:
    """sqrt of the sum of squared entries"""
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        return 0.0
    # scale first so huge or tiny entries do not overflow/underflow
    scale = float(np.max(np.abs(A)))
    if scale == 0.0:
        return 0.0
    return scale * float(np.sqrt(np.sum((A / scale) ** 2)))


def spectral_norm(A: DenseMatrix) -> float:
    """Largest singular value, computed exactly by the Jacobi SVD oracle"""
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        return 0.0
    from baselines.jacobi import singular_values

    return float(singular_values(A)[0])


def matrix_norm(A: DenseMatrix, norm: str = "spectral") -> float:
    """Dispatch on a norm tag ("spectral" or "frobenius")"""
    if norm == "frobenius":
        return frobenius_norm(A)
    if norm == "spectral":
        return spectral_norm(A)
    raise ValueError(f"unknown norm: {norm}")


def orthogonality_error(Q: DenseMatrix) -> float:
    """||Q^T Q - I||_F"""
    gram = matmul(Q, Q, trans_a=True)
    gram[np.diag_indices_from(gram)] -= 1.0
    return frobenius_norm(gram)


def reconstruction_error(A: DenseMatrix, U: DenseMatrix, T: DenseMatrix, V: DenseMatrix) -> float:
    """||A - U T V^T||_F"""
    return frobenius_norm(A - matmul(matmul(U, T), V, trans_b=True))


def relative_residual(A: DenseMatrix, U: DenseMatrix, T: DenseMatrix, V: DenseMatrix) -> float:
    """||A - U T V^T||_F / ||A||_F, or the absolute residual when A is zero"""
    residual = reconstruction_error(A, U, T, V)
    norm_a = frobenius_norm(A)
    return residual / norm_a if norm_a > 0.0 else residual
