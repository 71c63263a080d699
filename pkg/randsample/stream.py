"""
Seeded Gaussian variates with a fixed, documented generator

Uniforms come from numpy's PCG64 bit generator (``Generator.random``); consecutive
uniform pairs (u1, u2) become two standard normals by Box-Muller:

    z0 = sqrt(-2 ln(1 - u1)) cos(2 pi u2)
    z1 = sqrt(-2 ln(1 - u1)) sin(2 pi u2)

The second variate of a pair is kept as a spare, so the n-th variate of a stream does not
depend on how the draws were chunked.
"""

import logging
from typing import Optional

import numpy as np

from dense.core import DenseMatrix
from models.errors import ParameterError

logger = logging.getLogger(__name__)

SEED_LIMIT = 2 ** 64


class RandomStream:
    """Single-owner stream of standard normal variates"""

    ALGORITHM = "pcg64-box-muller"

    def __init__(self, seed: int):
        if not 0 <= int(seed) < SEED_LIMIT:
            raise ParameterError(f"seed {seed} outside [0, 2^64)")
        self.seed = int(seed)
        self._uniform = np.random.Generator(np.random.PCG64(self.seed))
        self._spare: Optional[float] = None
        self.draws = 0

    def normal(self, count: int) -> np.ndarray:
        """Next ``count`` variates of the stream"""
        if count < 0:
            raise ParameterError(f"cannot draw {count} variates")
        out = np.empty(count)
        filled = 0
        if count and self._spare is not None:
            out[0] = self._spare
            self._spare = None
            filled = 1

        remaining = count - filled
        pairs = (remaining + 1) // 2
        if pairs:
            u = self._uniform.random(2 * pairs).reshape(pairs, 2)
            radius = np.sqrt(-2.0 * np.log1p(-u[:, 0]))
            angle = 2.0 * np.pi * u[:, 1]
            z = np.empty(2 * pairs)
            z[0::2] = radius * np.cos(angle)
            z[1::2] = radius * np.sin(angle)
            out[filled:] = z[:remaining]
            if 2 * pairs > remaining:
                self._spare = float(z[-1])

        self.draws += count
        return out

    def skip(self, count: int) -> None:
        """Advance the stream as if ``count`` variates had been drawn"""
        self.normal(count)

    def __repr__(self) -> str:
        return f"RandomStream(seed={self.seed:#x}, draws={self.draws})"


def gaussian_matrix(stream: RandomStream, m: int, n: int) -> DenseMatrix:
    """m x n matrix of i.i.d. standard normals filled column by column"""
    if m < 1 or n < 1:
        raise ParameterError(f"gaussian_matrix needs positive dimensions, got {m}x{n}")
    return np.asfortranarray(stream.normal(m * n).reshape((m, n), order='F'))


def parse_seed(text: str) -> int:
    """Decimal or 0x-prefixed hexadecimal seed in [0, 2^64)"""
    cleaned = str(text).strip().lower()
    try:
        value = int(cleaned, 16) if cleaned.startswith("0x") else int(cleaned, 10)
    except ValueError:
        raise ParameterError(f"invalid seed '{text}': expected decimal or 0x-hex")
    if not 0 <= value < SEED_LIMIT:
        raise ParameterError(f"seed {text} outside [0, 2^64)")
    return value
