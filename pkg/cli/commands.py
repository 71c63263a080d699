"""
Subcommand handlers: each takes a CliConfig and returns a process exit code
"""

import json
import logging
from typing import Any, Callable, Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from baselines.cpqr import cpqr
from baselines.jacobi import jacobi_svd
from baselines.qlp import qlp
from config.loader import config_loader
from dense.core import orthogonality_error, relative_residual, spectral_norm
from dense.files import atomic_open
from dense.matrix_market import read_matrix_market, write_matrix_market
from evaluation.errors import diag_study, reference_sigma
from evaluation.experiment import run_experiment, summarize, write_records, write_summary
from evaluation.flops import FlopModel
from models.cli import CliConfig, ExitCode, Subcommand
from models.errors import LinalgError, MatrixMarketError
from models.experiment import ExperimentSpec, Method
from models.testmatrix import GeneratedMatrix
from randsample.stream import RandomStream
from randutv.driver import rand_utv
from randutv.theorem import verify_theorem
from testmat.generators import generate, parse_generator_spec

logger = logging.getLogger(__name__)


def _randutv_defaults(config: CliConfig) -> Dict[str, int]:
    cfg = config_loader.get_randutv_config()
    return {
        "b": config.b if config.b is not None else int(cfg.get('block_size', 50)),
        "q": config.q if config.q is not None else int(cfg.get('power_iterations', 2)),
        "p": config.p if config.p is not None else int(cfg.get('oversampling', 0)),
    }


def load_matrix(config: CliConfig) -> GeneratedMatrix:
    """The input matrix from --in or --gen"""
    if config.input_path is not None:
        A = read_matrix_market(config.input_path)
        return GeneratedMatrix(A=A, source=str(config.input_path))
    return generate(parse_generator_spec(config.gen))


def _write_json(path, payload: Dict[str, Any]) -> None:
    with atomic_open(path) as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _head(values: Optional[np.ndarray], length: int) -> Optional[List[float]]:
    if values is None:
        return None
    return [float(v) for v in values[:length]]


def cmd_factorize(config: CliConfig) -> int:
    """randUTV of the input; writes U.mtx, T.mtx, V.mtx and metadata.json"""
    matrix = load_matrix(config)
    params = _randutv_defaults(config)
    A = matrix.A
    m, n = A.shape

    F = rand_utv(A, stream=RandomStream(config.seed), build_ortho=config.build_ortho,
                 reorthonormalize=config.reorthonormalize, **params)

    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    write_matrix_market(out / "T.mtx", F.T, comment=f"randUTV T, b={params['b']} q={params['q']} seed={config.seed:#x}")
    if F.U is not None:
        write_matrix_market(out / "U.mtx", F.U)
        write_matrix_market(out / "V.mtx", F.V)

    head = int(config_loader.get_experiment_config().get('diag_head', 200))
    metadata: Dict[str, Any] = {
        "source": matrix.label,
        "m": m, "n": n, **params,
        "seed": config.seed,
        "build_ortho": config.build_ortho,
        "reorthonormalize": config.reorthonormalize,
        "steps": F.steps,
        "diag_head": _head(F.diagonal(), head),
        "known_sigma_head": _head(matrix.known_sigma, head),
        "reconstruction_residual": None,
        "orthogonality_U": None,
        "orthogonality_V": None,
    }
    if F.U is not None:
        metadata["reconstruction_residual"] = relative_residual(A, F.U, F.T, F.V)
        metadata["orthogonality_U"] = orthogonality_error(F.U)
        metadata["orthogonality_V"] = orthogonality_error(F.V)
    _write_json(out / "metadata.json", metadata)
    logger.info(f"Factorization of {matrix.label} written to {out}")

    if config.check and F.U is None:
        logger.warning("--check has nothing to verify without U and V (--no-ortho); no tolerance was checked")
    if config.check and F.U is not None:
        checks = config_loader.get_check_config()
        recon_tol = float(checks.get('reconstruction', 1e-12))
        ortho_tol = float(checks.get('orthogonality', 1e-12))
        failures = []
        if metadata["reconstruction_residual"] > recon_tol:
            failures.append(f"reconstruction {metadata['reconstruction_residual']:.2e} > {recon_tol:.0e}")
        if metadata["orthogonality_U"] > ortho_tol * np.sqrt(m):
            failures.append(f"U orthogonality {metadata['orthogonality_U']:.2e}")
        if metadata["orthogonality_V"] > ortho_tol * np.sqrt(n):
            failures.append(f"V orthogonality {metadata['orthogonality_V']:.2e}")
        if failures:
            logger.error(f"Check failed: {'; '.join(failures)}")
            return ExitCode.TOLERANCE_VIOLATION
    return ExitCode.SUCCESS


def build_experiment_spec(config: CliConfig) -> ExperimentSpec:
    """Recipe file (if any) overlaid with the flags given on the command line"""
    fields: Dict[str, Any] = config_loader.load_recipe(config.recipe) if config.recipe else {}
    if config.gen:
        gen = parse_generator_spec(config.gen)
        fields.update(family=gen.family, n=gen.n, matrix_seed=gen.seed)
        if gen.gap_index is not None:
            fields["gap_index"] = gen.gap_index
    qs = config.qs if config.qs is not None else ([config.q] if config.q is not None else None)
    overrides = {
        "b": config.b, "p": config.p, "qs": qs,
        "seeds": config.seeds, "methods": config.methods, "ks": config.ks,
    }
    fields.update({key: value for key, value in overrides.items() if value is not None})
    if "norms" not in fields:
        fields["norms"] = [config.norm]
    fields.setdefault("b", _randutv_defaults(config)["b"])
    fields.setdefault("seeds", [config.seed])
    return ExperimentSpec(**fields)


def cmd_errors(config: CliConfig) -> int:
    """Error-curve experiment; writes errors.csv and errors_summary.jsonl"""
    spec = build_experiment_spec(config)
    records = run_experiment(spec)
    config.out_dir.mkdir(parents=True, exist_ok=True)
    write_records(records, config.out_dir / "errors.csv")
    write_summary(summarize(records), config.out_dir / "errors_summary.jsonl")

    if config.check:
        slack = float(config_loader.get_check_config().get('eckart_young_slack', 1e-10))
        rel = pd.to_numeric(records["rel_err_pct"], errors="coerce")
        below = int((rel < 100.0 * (1.0 - slack)).sum())
        if below:
            logger.error(f"Check failed: {below} rows beat the optimal error")
            return ExitCode.TOLERANCE_VIOLATION
    return ExitCode.SUCCESS


def cmd_singvals(config: CliConfig) -> int:
    """Diagonal study; writes singvals.csv with the relative diagonal errors per method"""
    matrix = load_matrix(config)
    params = _randutv_defaults(config)
    sigma = reference_sigma(matrix)
    methods = config.methods or [Method.CPQR, Method.QLP, Method.RANDUTV]
    qs = config.qs if config.qs is not None else [params["q"]]

    factorizations = {}
    if Method.SVD in methods:
        factorizations["svd"] = jacobi_svd(matrix.A)
    if Method.CPQR in methods:
        factorizations["cpqr"] = cpqr(matrix.A)
    if Method.QLP in methods:
        factorizations["qlp"] = qlp(matrix.A)
    if Method.RANDUTV in methods:
        for q in qs:
            factorizations[f"randutv_q{q}"] = rand_utv(
                matrix.A, b=params["b"], q=q, p=params["p"], stream=RandomStream(config.seed),
                build_ortho=False, reorthonormalize=config.reorthonormalize,
            )

    study = diag_study(matrix, factorizations, sigma=sigma)
    r = min(len(v) for v in study.values())
    frame = pd.DataFrame({"index": np.arange(1, r + 1), "sigma": sigma[:r]})
    for label, errors in study.items():
        frame[f"{label}_rel_err_pct"] = errors[:r]

    config.out_dir.mkdir(parents=True, exist_ok=True)
    with atomic_open(config.out_dir / "singvals.csv") as handle:
        frame.to_csv(handle, index=False, float_format="%.17g")
    for label, errors in study.items():
        logger.info(f"{label}: median relative diagonal error {np.nanmedian(errors):.3f}%")
    return ExitCode.SUCCESS


def cmd_theorem_check(config: CliConfig) -> int:
    """Prints both sides of the two step identities and their gaps"""
    matrix = load_matrix(config)
    params = _randutv_defaults(config)
    A = matrix.A
    norms = verify_theorem(A, params["b"], params["q"], RandomStream(config.seed),
                           reorthonormalize=config.reorthonormalize)
    sigma_1 = spectral_norm(A)

    print(f"{'identity':<10} {'lhs':>24} {'rhs':>24} {'gap':>12}")
    print(f"{'(a)':<10} {norms.lhs_a:>24.17g} {norms.rhs_a:>24.17g} {norms.gap_a:>12.3e}")
    print(f"{'(b)':<10} {norms.lhs_b:>24.17g} {norms.rhs_b:>24.17g} {norms.gap_b:>12.3e}")
    print(f"sigma_1 = {sigma_1:.17g}")

    config.out_dir.mkdir(parents=True, exist_ok=True)
    _write_json(config.out_dir / "theorem.json", {
        **norms._asdict(), "gap_a": norms.gap_a, "gap_b": norms.gap_b, "sigma_1": sigma_1,
        "m": A.shape[0], "n": A.shape[1], "b": params["b"], "q": params["q"], "seed": config.seed,
    })

    if config.check:
        tol = float(config_loader.get_check_config().get('theorem', 1e-10)) * sigma_1
        # the second identity is only asserted for tall or square inputs
        violated = norms.gap_a > tol or (A.shape[0] >= A.shape[1] and norms.gap_b > tol)
        if violated:
            logger.error(f"Check failed: gaps {norms.gap_a:.2e}, {norms.gap_b:.2e} exceed {tol:.2e}")
            return ExitCode.TOLERANCE_VIOLATION
    return ExitCode.SUCCESS


def cmd_flops(config: CliConfig) -> int:
    """Prints the flop formulas and the randUTV / CPQR ratio"""
    n = config.n
    m = config.m if config.m is not None else n
    q = config.q if config.q is not None else 0
    model = FlopModel(m=m, n=n, q=q)
    for name, value in model.table().items():
        if name == "randutv_over_cpqr":
            print(f"{name:<20} {float(value):.2f}")
        else:
            print(f"{name:<20} {float(value):.6e}")
    return ExitCode.SUCCESS


def cmd_gen(config: CliConfig) -> int:
    """Writes A.mtx and, when known, sigma.mtx"""
    matrix = generate(parse_generator_spec(config.gen))
    config.out_dir.mkdir(parents=True, exist_ok=True)
    write_matrix_market(config.out_dir / "A.mtx", matrix.A, comment=matrix.label)
    if matrix.known_sigma is not None:
        write_matrix_market(config.out_dir / "sigma.mtx", matrix.known_sigma, comment=f"singular values of {matrix.label}")
    logger.info(f"Generated {matrix.label} into {config.out_dir}")
    return ExitCode.SUCCESS


HANDLERS: Dict[Subcommand, Callable[[CliConfig], int]] = {
    Subcommand.FACTORIZE: cmd_factorize,
    Subcommand.ERRORS: cmd_errors,
    Subcommand.SINGVALS: cmd_singvals,
    Subcommand.THEOREM_CHECK: cmd_theorem_check,
    Subcommand.FLOPS: cmd_flops,
    Subcommand.GEN: cmd_gen,
}


def run_command(config: CliConfig) -> int:
    """Dispatch a subcommand and map failures to exit codes"""
    try:
        return int(HANDLERS[config.subcommand](config))
    except (MatrixMarketError, OSError) as e:
        logger.error(f"I/O error in {config.subcommand.value}: {e}")
        return ExitCode.IO
    except (LinalgError, ValidationError, ValueError) as e:
        logger.error(f"Invalid input for {config.subcommand.value}: {e}")
        return ExitCode.USAGE
