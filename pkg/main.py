#!/usr/bin/env python3
"""
randUTV toolkit
Command-line entry point
"""

import argparse
import logging
import sys
from logging.handlers import RotatingFileHandler
from typing import List, Optional

from pydantic import ValidationError

from cli.commands import run_command
from config.loader import config_loader
from models.cli import CliConfig, ExitCode, Subcommand
from models.errors import ParameterError
from randsample.stream import parse_seed

logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False) -> None:
    """Configure the root logger from the ``logging`` settings section"""
    cfg = config_loader.get_logging_config()
    level = logging.DEBUG if verbose else getattr(logging, str(cfg.get('level', 'INFO')).upper(), logging.INFO)
    fmt = cfg.get('format', "%(asctime)s %(levelname)s %(name)s: %(message)s")

    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if cfg.get('file'):
        handlers.append(RotatingFileHandler(
            cfg['file'],
            maxBytes=int(cfg.get('max_file_size_mb', 100)) * 1024 * 1024,
            backupCount=int(cfg.get('backup_count', 5)),
        ))
    logging.basicConfig(level=level, format=fmt, handlers=handlers, force=True)


def _int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got '{text}'")


def _seed(text: str) -> int:
    try:
        return parse_seed(text)
    except ParameterError as e:
        raise argparse.ArgumentTypeError(str(e))


def _seed_list(text: str) -> List[int]:
    return [_seed(item) for item in text.split(',') if item.strip()]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--in', dest='input_path', help='Matrix Market input file')
    parser.add_argument('--gen', help='Generator spec, e.g. fast-decay:n=400,seed=7')
    parser.add_argument('--b', type=int, help='Block size')
    parser.add_argument('--q', type=int, help='Power iteration count')
    parser.add_argument('--p', type=int, help='Oversampling')
    parser.add_argument('--seed', type=_seed, default=0, help='Random seed (decimal or 0x-hex)')
    parser.add_argument('--norm', choices=['spectral', 'frobenius'], default='spectral')
    parser.add_argument('--no-ortho', dest='build_ortho', action='store_false', help='Do not accumulate U and V')
    parser.add_argument('--no-reortho', dest='reorthonormalize', action='store_false',
                        help='No orthonormalization between power iterations')
    parser.add_argument('--out-dir', default='out', help='Output directory')
    parser.add_argument('--check', action='store_true', help='Exit 1 when a tolerance is violated')
    parser.add_argument('-v', '--verbose', action='store_true')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='randutv', description='Randomized UTV factorization toolkit')
    sub = parser.add_subparsers(dest='subcommand', required=True)

    factorize = sub.add_parser('factorize', help='randUTV of a matrix')
    _add_common(factorize)

    errors = sub.add_parser('errors', help='Rank-k error study')
    _add_common(errors)
    errors.add_argument('--recipe', help='Experiment recipe name or YAML path')
    errors.add_argument('--qs', type=_int_list, help='Comma-separated power iteration counts')
    errors.add_argument('--seeds', type=_seed_list, help='Comma-separated seeds')
    errors.add_argument('--methods', type=lambda s: [m.strip() for m in s.split(',') if m.strip()],
                        help='Comma-separated methods (svd,cpqr,qlp,randutv)')
    errors.add_argument('--ks', type=_int_list, help='Comma-separated ranks')

    singvals = sub.add_parser('singvals', help='Singular value estimates on the factor diagonals')
    _add_common(singvals)
    singvals.add_argument('--qs', type=_int_list, help='Comma-separated power iteration counts')
    singvals.add_argument('--methods', type=lambda s: [m.strip() for m in s.split(',') if m.strip()])

    theorem = sub.add_parser('theorem-check', help='Range finder / randUTV step identities')
    _add_common(theorem)

    flops = sub.add_parser('flops', help='Flop model')
    flops.add_argument('--m', type=int, help='Rows (defaults to n)')
    flops.add_argument('--n', type=int, required=True, help='Columns')
    flops.add_argument('--q', type=int, default=0, help='Power iteration count')
    flops.add_argument('-v', '--verbose', action='store_true')

    gen = sub.add_parser('gen', help='Write a test matrix')
    gen.add_argument('--gen', required=True, help='Generator spec')
    gen.add_argument('--out-dir', default='out')
    gen.add_argument('-v', '--verbose', action='store_true')

    return parser


def parse_config(argv: Optional[List[str]] = None) -> CliConfig:
    args = vars(build_parser().parse_args(argv))
    verbose = args.pop('verbose', False)
    setup_logging(verbose)
    return CliConfig(**{key: value for key, value in args.items() if value is not None})


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = parse_config(argv)
    except ValidationError as e:
        logging.getLogger(__name__).error(f"Invalid arguments: {e}")
        return ExitCode.USAGE
    except SystemExit as e:
        return int(e.code or 0)

    logger.info(f"Running {config.subcommand.value}")
    return run_command(config)


if __name__ == "__main__":
    sys.exit(int(main()))
