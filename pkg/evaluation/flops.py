"""
Leading-order flop counts of randUTV and the factorizations it competes with
"""

from fractions import Fraction
from typing import Dict

from pydantic import BaseModel, Field, model_validator

from models.errors import ParameterError


def _check(m: int, n: int) -> None:
    if not m >= n >= 1:
        raise ParameterError(f"flop formulas need m >= n >= 1, got m={m}, n={n}")


def flops_randutv(m: int, n: int, q: int) -> Fraction:
    """(5 + 2q) m n^2 - (3 + 2q) n^3 / 3, without orthonormal factors"""
    _check(m, n)
    return (5 + 2 * q) * m * n ** 2 - Fraction((3 + 2 * q) * n ** 3, 3)


def flops_cpqr(m: int, n: int) -> Fraction:
    _check(m, n)
    return 2 * m * n ** 2 - Fraction(2 * n ** 3, 3)


def flops_bidiag(m: int, n: int) -> Fraction:
    """Golub-Kahan bidiagonalization applied directly"""
    _check(m, n)
    return 4 * m * n ** 2 - Fraction(4 * n ** 3, 3)


def flops_bidiag_tall(m: int, n: int) -> Fraction:
    """QR first, then bidiagonalization of the n x n triangle"""
    _check(m, n)
    return Fraction(2 * m * n ** 2 + 2 * n ** 3)


class FlopModel(BaseModel):
    """Flop formulas evaluated for one problem shape"""
    m: int = Field(ge=1)
    n: int = Field(ge=1)
    q: int = Field(default=0, ge=0)

    @model_validator(mode='after')
    def _tall(self) -> 'FlopModel':
        if self.m < self.n:
            raise ValueError(f"flop model needs m >= n, got m={self.m}, n={self.n}")
        return self

    def randutv(self) -> Fraction:
        return flops_randutv(self.m, self.n, self.q)

    def cpqr(self) -> Fraction:
        return flops_cpqr(self.m, self.n)

    def bidiag(self) -> Fraction:
        return flops_bidiag(self.m, self.n)

    def bidiag_tall(self) -> Fraction:
        return flops_bidiag_tall(self.m, self.n)

    def ratio_to_cpqr(self) -> Fraction:
        return self.randutv() / self.cpqr()

    def table(self) -> Dict[str, Fraction]:
        return {
            "randutv": self.randutv(),
            "cpqr": self.cpqr(),
            "bidiag": self.bidiag(),
            "bidiag_tall": self.bidiag_tall(),
            "randutv_over_cpqr": self.ratio_to_cpqr(),
        }
