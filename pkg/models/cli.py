"""
Command-line configuration model and exit codes
"""

from enum import Enum, IntEnum
from pathlib import Path
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from models.experiment import Method, NormKind


class Subcommand(str, Enum):
    FACTORIZE = "factorize"
    ERRORS = "errors"
    SINGVALS = "singvals"
    THEOREM_CHECK = "theorem-check"
    FLOPS = "flops"
    GEN = "gen"


class ExitCode(IntEnum):
    SUCCESS = 0
    TOLERANCE_VIOLATION = 1
    USAGE = 2
    IO = 3


# subcommands that factorize one input matrix
MATRIX_INPUT = {Subcommand.FACTORIZE, Subcommand.SINGVALS, Subcommand.THEOREM_CHECK}


class CliConfig(BaseModel):
    """
    Parsed command line.

    Unset numeric parameters fall back to the ``randutv`` settings section.
    """
    subcommand: Subcommand
    input_path: Optional[Path] = None
    gen: Optional[str] = None
    recipe: Optional[str] = None
    b: Optional[int] = Field(default=None, ge=1)
    q: Optional[int] = Field(default=None, ge=0)
    p: Optional[int] = Field(default=None, ge=0)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    norm: NormKind = NormKind.SPECTRAL
    out_dir: Path = Path("out")
    build_ortho: bool = True
    reorthonormalize: bool = True
    check: bool = False
    qs: Optional[List[int]] = None
    seeds: Optional[List[int]] = None
    methods: Optional[List[Method]] = None
    ks: Optional[List[int]] = None
    m: Optional[int] = Field(default=None, ge=1)
    n: Optional[int] = Field(default=None, ge=1)

    @model_validator(mode='after')
    def _one_input(self) -> 'CliConfig':
        if self.subcommand in MATRIX_INPUT:
            if (self.input_path is None) == (self.gen is None):
                raise ValueError(f"{self.subcommand.value} needs exactly one of --in or --gen")
        elif self.subcommand is Subcommand.GEN and self.gen is None:
            raise ValueError("gen needs --gen")
        elif self.subcommand is Subcommand.ERRORS and self.recipe is None and self.gen is None:
            raise ValueError("errors needs --recipe or --gen")
        elif self.subcommand is Subcommand.FLOPS and self.n is None:
            raise ValueError("flops needs --n")
        return self
