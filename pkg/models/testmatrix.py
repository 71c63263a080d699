"""
Data models for the generated test matrices
"""

from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class MatrixFamily(str, Enum):
    FAST_DECAY = "fast-decay"
    S_SHAPED = "s-shaped"
    GAP = "gap"
    BIE = "bie"


class TestMatrixSpec(BaseModel):
    """
    Named generator family plus its parameters.

    Parameters left as None take their value from the ``testmat`` settings section.
    """
    __test__ = False

    model_config = ConfigDict(frozen=True)

    family: MatrixFamily
    n: int = Field(ge=2)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    beta: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    plateau: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    hover_fraction: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    decay_end_fraction: Optional[float] = Field(default=None, gt=0.0, le=1.0)
    gap_index: Optional[int] = Field(default=None, ge=1)
    gap_factor: Optional[float] = Field(default=None, gt=0.0)
    semi_axis_a: Optional[float] = Field(default=None, gt=0.0)
    semi_axis_b: Optional[float] = Field(default=None, gt=0.0)

    @property
    def label(self) -> str:
        return f"{self.family.value}:n={self.n},seed={self.seed}"


class GeneratedMatrix(BaseModel):
    """A generated matrix with its singular values when known by construction"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    A: np.ndarray
    known_sigma: Optional[np.ndarray] = None
    spec: Optional[TestMatrixSpec] = None
    source: Optional[str] = None

    @property
    def label(self) -> str:
        if self.spec is not None:
            return self.spec.label
        return self.source or f"{self.A.shape[0]}x{self.A.shape[1]} input"
