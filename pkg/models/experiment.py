"""
Data models for error studies and experiment recipes
"""

from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from models.testmatrix import MatrixFamily


class Method(str, Enum):
    SVD = "svd"
    CPQR = "cpqr"
    QLP = "qlp"
    RANDUTV = "randutv"


class NormKind(str, Enum):
    SPECTRAL = "spectral"
    FROBENIUS = "frobenius"


class ErrorCurve(BaseModel):
    """
    Rank-k errors of one factorization.

    ``rel_err_pct`` is 100 * e_k / optimal_k, None where the optimal error vanishes.
    """
    method: str
    norm: NormKind
    ks: List[int]
    abs_err: List[float]
    rel_err_pct: List[Optional[float]]


class ExperimentSpec(BaseModel):
    """One error study: a matrix family, the methods compared and the seeds averaged over"""
    family: MatrixFamily
    n: int = Field(ge=2)
    b: int = Field(ge=1)
    qs: List[int] = Field(default_factory=lambda: [0, 1, 2], min_length=1)
    p: int = Field(default=0, ge=0)
    seeds: List[int] = Field(min_length=1)
    norms: List[NormKind] = Field(default_factory=lambda: [NormKind.SPECTRAL], min_length=1)
    methods: List[Method] = Field(min_length=1)
    ks: Optional[List[int]] = None
    gap_index: Optional[int] = Field(default=None, ge=1)
    matrix_seed: Optional[int] = Field(default=None, ge=0, lt=2 ** 64)
    workers: Optional[int] = Field(default=None, ge=1)

    @field_validator('qs')
    @classmethod
    def _non_negative_qs(cls, qs: List[int]) -> List[int]:
        if any(q < 0 for q in qs):
            raise ValueError(f"power iteration counts must be non-negative, got {qs}")
        return qs

    @field_validator('seeds')
    @classmethod
    def _seed_range(cls, seeds: List[int]) -> List[int]:
        if any(not 0 <= s < 2 ** 64 for s in seeds):
            raise ValueError("seeds must lie in [0, 2^64)")
        return seeds

    @model_validator(mode='after')
    def _check_ranks(self) -> 'ExperimentSpec':
        if self.b >= self.n:
            raise ValueError(f"b={self.b} must be smaller than n={self.n}")
        if self.ks is None:
            self.ks = list(range(self.b, self.n, self.b))
        bad = [k for k in self.ks if not 1 <= k <= self.n]
        if bad or not self.ks:
            raise ValueError(f"ks must be a non-empty list within [1, {self.n}], offending: {bad}")
        return self
