"""
Deterministic generators for the four test-matrix families
"""

import logging
from typing import Any, Callable, Dict, Optional

import numpy as np

from config.loader import config_loader
from dense.core import DenseMatrix, matmul
from householder.reflectors import explicit_q, qr_unpivoted
from models.errors import ParameterError
from models.testmatrix import GeneratedMatrix, MatrixFamily, TestMatrixSpec
from randsample.stream import RandomStream, gaussian_matrix, parse_seed

logger = logging.getLogger(__name__)


def _family_config(name: str) -> Dict[str, Any]:
    return config_loader.get_testmat_config().get(name, {}) or {}


def _random_orthonormal_pair(n: int, seed: int):
    """U then V, each the Q factor of an unpivoted QR of an n x n Gaussian matrix"""
    stream = RandomStream(seed)
    U = explicit_q(qr_unpivoted(gaussian_matrix(stream, n, n))[0])
    V = explicit_q(qr_unpivoted(gaussian_matrix(stream, n, n))[0])
    return U, V


def _from_spectrum(spec: TestMatrixSpec, d: np.ndarray) -> GeneratedMatrix:
    U, V = _random_orthonormal_pair(spec.n, spec.seed)
    A = matmul(U * d, V, trans_b=True)
    return GeneratedMatrix(A=A, known_sigma=d, spec=spec)


def fast_decay_spectrum(n: int, beta: float) -> np.ndarray:
    """d_j = beta^((j-1)/(n-1))"""
    return beta ** (np.arange(n) / (n - 1))


def s_shaped_spectrum(n: int, plateau: float, hover_fraction: float, decay_end_fraction: float) -> np.ndarray:
    """Hover at 1, decay geometrically to ``plateau``, then level out"""
    j = np.arange(1, n + 1)
    j1 = int(np.floor(n * hover_fraction))
    j2 = int(np.floor(n * decay_end_fraction))
    if not 1 <= j1 < j2 <= n:
        raise ParameterError(f"S-shaped breakpoints {j1}, {j2} do not fit n={n}")
    d = np.full(n, plateau)
    d[j <= j1] = 1.0
    ramp = (j > j1) & (j <= j2)
    d[ramp] = plateau ** ((j[ramp] - j1) / (j2 - j1))
    return d


def gap_spectrum(n: int, gap_index: int, gap_factor: float) -> np.ndarray:
    """1/j up to the gap, gap_factor/j beyond it"""
    j = np.arange(1, n + 1, dtype=np.float64)
    return np.where(j <= gap_index, 1.0 / j, gap_factor / j)


def gen_fast_decay(n: int, seed: int = 0, beta: Optional[float] = None) -> GeneratedMatrix:
    beta = float(_family_config('fast_decay').get('beta', 1e-5)) if beta is None else beta
    spec = TestMatrixSpec(family=MatrixFamily.FAST_DECAY, n=n, seed=seed, beta=beta)
    return _from_spectrum(spec, fast_decay_spectrum(n, beta))


def gen_s_shaped(n: int, seed: int = 0, plateau: Optional[float] = None,
                 hover_fraction: Optional[float] = None,
                 decay_end_fraction: Optional[float] = None) -> GeneratedMatrix:
    if n < 20:
        raise ParameterError(f"S-shaped matrices need n >= 20, got {n}")
    cfg = _family_config('s_shaped')
    plateau = float(cfg.get('plateau', 1e-2)) if plateau is None else plateau
    hover_fraction = float(cfg.get('hover_fraction', 0.125)) if hover_fraction is None else hover_fraction
    decay_end_fraction = float(cfg.get('decay_end_fraction', 0.5)) if decay_end_fraction is None else decay_end_fraction
    spec = TestMatrixSpec(family=MatrixFamily.S_SHAPED, n=n, seed=seed, plateau=plateau,
                          hover_fraction=hover_fraction, decay_end_fraction=decay_end_fraction)
    return _from_spectrum(spec, s_shaped_spectrum(n, plateau, hover_fraction, decay_end_fraction))


def gen_gap(n: int, seed: int = 0, gap_index: Optional[int] = None,
            gap_factor: Optional[float] = None) -> GeneratedMatrix:
    cfg = _family_config('gap')
    gap_index = int(cfg.get('gap_index', 150)) if gap_index is None else gap_index
    gap_factor = float(cfg.get('gap_factor', 0.1)) if gap_factor is None else gap_factor
    if n <= gap_index:
        raise ParameterError(f"gap matrix needs n > gap_index, got n={n}, gap_index={gap_index}")
    spec = TestMatrixSpec(family=MatrixFamily.GAP, n=n, seed=seed, gap_index=gap_index, gap_factor=gap_factor)
    return _from_spectrum(spec, gap_spectrum(n, gap_index, gap_factor))


def gen_bie(n: int, seed: int = 0, semi_axis_a: Optional[float] = None,
            semi_axis_b: Optional[float] = None) -> GeneratedMatrix:
    """
    Nystrom matrix of the single layer kernel -(1/2pi) log|x(s) - x(t)| on an ellipse

    Trapezoidal rule on n equispaced nodes with symmetric weights h sqrt(|x'(t_i)| |x'(t_j)|);
    the diagonal takes the log-regularized limit -(1/2pi) log(h |x'(t_i)| / 2) h |x'(t_i)|.
    """
    if n < 32 or n % 2:
        raise ParameterError(f"BIE matrices need an even n >= 32, got {n}")
    cfg = _family_config('bie')
    a = float(cfg.get('semi_axis_a', 1.0)) if semi_axis_a is None else semi_axis_a
    b = float(cfg.get('semi_axis_b', 0.7)) if semi_axis_b is None else semi_axis_b
    spec = TestMatrixSpec(family=MatrixFamily.BIE, n=n, seed=seed, semi_axis_a=a, semi_axis_b=b)

    h = 2.0 * np.pi / n
    t = h * np.arange(n)
    x = np.column_stack((a * np.cos(t), b * np.sin(t)))
    speed = np.hypot(a * np.sin(t), b * np.cos(t))

    distance = np.hypot(x[:, None, 0] - x[None, :, 0], x[:, None, 1] - x[None, :, 1])
    np.fill_diagonal(distance, 1.0)
    weights = h * np.sqrt(np.outer(speed, speed))
    A = -np.log(distance) * weights / (2.0 * np.pi)
    np.fill_diagonal(A, -np.log(h * speed / 2.0) * h * speed / (2.0 * np.pi))
    return GeneratedMatrix(A=np.asfortranarray(A), known_sigma=None, spec=spec)


GENERATORS: Dict[MatrixFamily, Callable[..., GeneratedMatrix]] = {
    MatrixFamily.FAST_DECAY: gen_fast_decay,
    MatrixFamily.S_SHAPED: gen_s_shaped,
    MatrixFamily.GAP: gen_gap,
    MatrixFamily.BIE: gen_bie,
}

_FAMILY_PARAMETERS = {
    MatrixFamily.FAST_DECAY: ('beta',),
    MatrixFamily.S_SHAPED: ('plateau', 'hover_fraction', 'decay_end_fraction'),
    MatrixFamily.GAP: ('gap_index', 'gap_factor'),
    MatrixFamily.BIE: ('semi_axis_a', 'semi_axis_b'),
}


def generate(spec: TestMatrixSpec) -> GeneratedMatrix:
    """Build the matrix a spec describes"""
    params = {key: getattr(spec, key) for key in _FAMILY_PARAMETERS[spec.family]}
    logger.debug(f"Generating {spec.label}")
    return GENERATORS[spec.family](spec.n, seed=spec.seed, **params)


def parse_generator_spec(text: str) -> TestMatrixSpec:
    """
    Parse "family:key=value,..." such as "fast-decay:n=400,seed=7"

    n defaults to the ``testmat.n`` setting; seeds accept decimal or 0x-hex.
    """
    family_text, _, rest = text.strip().partition(':')
    try:
        family = MatrixFamily(family_text.strip().lower())
    except ValueError:
        choices = ", ".join(f.value for f in MatrixFamily)
        raise ParameterError(f"unknown matrix family '{family_text}' (choose from {choices})")

    fields: Dict[str, Any] = {'family': family}
    for item in filter(None, (part.strip() for part in rest.split(','))):
        key, sep, value = item.partition('=')
        key = key.strip().replace('-', '_')
        if not sep:
            raise ParameterError(f"generator parameter '{item}' is not key=value")
        if key == 'seed':
            fields[key] = parse_seed(value)
        elif key == 'n':
            fields[key] = int(value)
        elif key in _FAMILY_PARAMETERS[family]:
            fields[key] = int(value) if key == 'gap_index' else float(value)
        else:
            raise ParameterError(f"parameter '{key}' does not apply to family {family.value}")
    fields.setdefault('n', int(config_loader.get_testmat_config().get('n', 400)))
    return TestMatrixSpec(**fields)
