"""
Matrix Market "array real general" reader and writer
"""

import logging
from pathlib import Path
from typing import Optional, Union

import numpy as np

from dense.core import DenseMatrix, as_dense
from dense.files import atomic_open
from models.errors import MatrixMarketError

logger = logging.getLogger(__name__)

HEADER = "%%MatrixMarket matrix array real general"


def read_matrix_market(path: Union[str, Path]) -> DenseMatrix:
    """
    Read a dense Matrix Market file

    Args:
        path: File with an ``array real general`` header and a column-major body

    Returns:
        The matrix as a column-major float64 array
    """
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            lines = handle.read().splitlines()
    except UnicodeDecodeError as e:
        raise MatrixMarketError(f"{path}: not a text file ({e.reason} at byte {e.start})")

    if not lines:
        raise MatrixMarketError(f"{path}: empty file")
    banner = lines[0].split()
    if len(banner) != 5 or banner[0] != "%%MatrixMarket":
        raise MatrixMarketError(f"{path}: missing %%MatrixMarket banner")
    obj, fmt, field, symmetry = (token.lower() for token in banner[1:])
    if (obj, fmt, field, symmetry) != ("matrix", "array", "real", "general"):
        raise MatrixMarketError(
            f"{path}: unsupported header '{lines[0]}', expected '{HEADER}'"
        )

    body = [line.strip() for line in lines[1:] if line.strip() and not line.lstrip().startswith('%')]
    if not body:
        raise MatrixMarketError(f"{path}: missing size line")
    try:
        rows, cols = (int(token) for token in body[0].split())
    except ValueError:
        raise MatrixMarketError(f"{path}: malformed size line '{body[0]}'")
    if rows < 0 or cols < 0:
        raise MatrixMarketError(f"{path}: negative dimensions {rows}x{cols}")

    try:
        values = np.array([float(token) for line in body[1:] for token in line.split()], dtype=np.float64)
    except ValueError as e:
        raise MatrixMarketError(f"{path}: malformed value ({e})")
    if values.size != rows * cols:
        raise MatrixMarketError(f"{path}: expected {rows * cols} values, found {values.size}")

    logger.debug(f"Read {rows}x{cols} matrix from {path}")
    return as_dense(values.reshape((rows, cols), order='F'), copy=True)


def write_matrix_market(path: Union[str, Path], A: DenseMatrix, comment: Optional[str] = None) -> None:
    """Write A in column-major body order with 17 significant digits"""
    A = as_dense(A, check_finite=False)
    rows, cols = A.shape
    with atomic_open(path) as handle:
        handle.write(HEADER + "\n")
        if comment:
            for line in comment.splitlines():
                handle.write(f"% {line}\n")
        handle.write(f"{rows} {cols}\n")
        for value in A.ravel(order='F'):
            handle.write(f"{value:.17g}\n")
    logger.debug(f"Wrote {rows}x{cols} matrix to {path}")
