"""
Exception types raised by the toolkit
"""


class LinalgError(Exception):
    """Base class for every toolkit error"""


class DimensionMismatchError(LinalgError, ValueError):
    """Operands do not conform"""


class NonFiniteInputError(LinalgError, ValueError):
    """NaN or Inf reached a factorization routine"""


class SizeLimitError(LinalgError, ValueError):
    """Problem exceeds the desk-scale cap of the exact oracles"""


class UnsupportedShapeError(LinalgError, ValueError):
    """Shape outside what an implementation handles"""


class ParameterError(LinalgError, ValueError):
    """Block size, rank or oversampling parameter out of range"""


class ConfigurationError(LinalgError, ValueError):
    """Missing reference data or inconsistent experiment configuration"""


class MatrixMarketError(LinalgError, ValueError):
    """Malformed Matrix Market file"""
