"""
Experiment orchestration: factorize generated matrices and record rank-k errors
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, Iterator, List, Tuple, Union

import pandas as pd

from baselines.cpqr import cpqr
from baselines.jacobi import jacobi_svd
from baselines.qlp import qlp
from config.loader import config_loader
from dense.core import DenseMatrix
from dense.files import atomic_open
from evaluation.errors import Factorization, error_curve, reference_sigma
from models.experiment import ExperimentSpec, Method
from models.testmatrix import TestMatrixSpec
from randsample.stream import RandomStream
from randutv.driver import rand_utv
from testmat.generators import generate

logger = logging.getLogger(__name__)

COLUMNS = ["family", "n", "b", "q", "p", "seed", "method", "k", "abs_err", "rel_err_pct", "norm"]
KEY = ["family", "n", "b", "q", "p", "method", "k", "norm", "seed"]
SUMMARY_KEY = ["family", "n", "b", "q", "p", "method", "k", "norm"]


class ExperimentRunner:
    """
    Runs one ExperimentSpec seed by seed.

    Every seed is an independent cell: its matrix is generated from ``matrix_seed`` when
    given, otherwise from the cell seed, and randUTV draws from a stream seeded the same way.
    """

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self.methods = {
            Method.SVD: self._run_svd,
            Method.CPQR: self._run_cpqr,
            Method.QLP: self._run_qlp,
            Method.RANDUTV: self._run_randutv,
        }

    def run(self) -> pd.DataFrame:
        """All cells, rows sorted by key regardless of completion order"""
        workers = self.spec.workers or int(config_loader.get_experiment_config().get('workers', 1))
        logger.info(f"Running {self.spec.family.value} n={self.spec.n} b={self.spec.b} "
                    f"over {len(self.spec.seeds)} seeds with {workers} worker(s)")

        if workers > 1 and len(self.spec.seeds) > 1:
            payload = self.spec.model_dump(mode='json')
            with ProcessPoolExecutor(max_workers=workers) as pool:
                cells = list(pool.map(_run_cell, [payload] * len(self.spec.seeds), self.spec.seeds))
        else:
            cells = [self.run_cell(seed) for seed in self.spec.seeds]

        rows = [row for cell in cells for row in cell]
        frame = pd.DataFrame(rows, columns=COLUMNS)
        frame["rel_err_pct"] = pd.to_numeric(frame["rel_err_pct"], errors="coerce")
        return frame.sort_values(KEY, kind='stable').reset_index(drop=True)

    def run_cell(self, seed: int) -> List[Dict[str, Any]]:
        spec = self.spec
        matrix_seed = spec.matrix_seed if spec.matrix_seed is not None else seed
        matrix = generate(TestMatrixSpec(family=spec.family, n=spec.n, seed=matrix_seed,
                                         gap_index=spec.gap_index))
        sigma = reference_sigma(matrix)

        rows: List[Dict[str, Any]] = []
        for method in spec.methods:
            for q, p, factorization in self.methods[method](matrix.A, seed):
                for norm in spec.norms:
                    curve = error_curve(matrix, factorization, norm, spec.ks, method=method.value, sigma=sigma)
                    for k, abs_err, rel_err in zip(curve.ks, curve.abs_err, curve.rel_err_pct):
                        rows.append({
                            "family": spec.family.value, "n": spec.n, "b": spec.b, "q": q, "p": p,
                            "seed": seed, "method": method.value, "k": k, "abs_err": abs_err,
                            "rel_err_pct": rel_err, "norm": norm.value,
                        })
        logger.debug(f"Cell seed={seed}: {len(rows)} rows")
        return rows

    def _run_svd(self, A: DenseMatrix, seed: int) -> Iterator[Tuple[int, int, Factorization]]:
        yield 0, 0, jacobi_svd(A)

    def _run_cpqr(self, A: DenseMatrix, seed: int) -> Iterator[Tuple[int, int, Factorization]]:
        yield 0, 0, cpqr(A)

    def _run_qlp(self, A: DenseMatrix, seed: int) -> Iterator[Tuple[int, int, Factorization]]:
        yield 0, 0, qlp(A)

    def _run_randutv(self, A: DenseMatrix, seed: int) -> Iterator[Tuple[int, int, Factorization]]:
        for q in self.spec.qs:
            F = rand_utv(A, b=self.spec.b, q=q, p=self.spec.p, stream=RandomStream(seed), build_ortho=False)
            yield q, self.spec.p, F


def _run_cell(payload: Dict[str, Any], seed: int) -> List[Dict[str, Any]]:
    return ExperimentRunner(ExperimentSpec(**payload)).run_cell(seed)


def run_experiment(spec: Union[ExperimentSpec, Dict[str, Any]]) -> pd.DataFrame:
    """One CSV row per (method, q, k, norm, seed)"""
    if not isinstance(spec, ExperimentSpec):
        spec = ExperimentSpec(**spec)
    return ExperimentRunner(spec).run()


def summarize(records: pd.DataFrame) -> pd.DataFrame:
    """Medians over seeds per (family, n, b, q, p, method, k, norm)"""
    grouped = records.groupby(SUMMARY_KEY, sort=True, dropna=False)
    summary = grouped.agg(
        abs_err=("abs_err", "median"),
        rel_err_pct=("rel_err_pct", "median"),
        seeds=("seed", "count"),
    )
    return summary.reset_index()


def write_records(records: pd.DataFrame, csv_path: Union[str, Path]) -> None:
    with atomic_open(csv_path) as handle:
        records.to_csv(handle, index=False, float_format="%.17g")
    logger.info(f"Wrote {len(records)} rows to {csv_path}")


def write_summary(summary: pd.DataFrame, path: Union[str, Path]) -> None:
    """Summary as JSON lines, one record per group"""
    with atomic_open(path) as handle:
        text = summary.to_json(orient='records', lines=True, double_precision=15)
        handle.write(text if text.endswith("\n") else text + "\n")
    logger.info(f"Wrote {len(summary)} summary records to {path}")
