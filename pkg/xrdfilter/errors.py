"""Exception hierarchy. Each error carries the CLI exit code it maps to."""

from __future__ import annotations

from typing import Any, Optional

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


class XrdFilterError(Exception):
    exit_code: int = EXIT_DATA
    code: str = "XRDFILTER_ERROR"


class UsageError(XrdFilterError):
    exit_code = EXIT_USAGE
    code = "USAGE"


class ConfigError(XrdFilterError):
    code = "BAD_CONFIG"


class InvalidShape(XrdFilterError):
    code = "INVALID_SHAPE"


class DimensionMismatch(XrdFilterError):
    code = "DIMENSION_MISMATCH"


class InvalidK(XrdFilterError):
    code = "INVALID_K"


class TooLarge(XrdFilterError):
    code = "TOO_LARGE"


class ZeroPole(XrdFilterError):
    code = "ZERO_POLE"


class ImaginaryResidualExceeded(XrdFilterError):
    code = "IMAGINARY_RESIDUAL"


class NoTransition(XrdFilterError):
    code = "NO_TRANSITION"


class NegativeIntensity(XrdFilterError):
    code = "NEGATIVE_INTENSITY"


class ZeroSignal(XrdFilterError):
    code = "ZERO_SIGNAL"


class PerfectFilter(XrdFilterError):
    code = "PERFECT_FILTER"


class ParseError(XrdFilterError):
    code = "PARSE_ERROR"

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class NonUniformGrid(XrdFilterError):
    code = "NON_UNIFORM_GRID"


class BadCoefficients(XrdFilterError):
    code = "BAD_COEFFICIENTS"


class DegenerateDenominator(XrdFilterError):
    code = "DEGENERATE_DENOMINATOR"


class Unsupported(XrdFilterError):
    code = "UNSUPPORTED"


class BenchFailure(XrdFilterError):
    code = "BENCH_FAILURE"


class NoConvergence(XrdFilterError):
    exit_code = EXIT_NUMERICAL
    code = "NO_CONVERGENCE"

    def __init__(self, message: str, partial: Any = None, iterations: Optional[int] = None):
        self.partial = partial
        self.iterations = iterations
        super().__init__(message)


class RankDeficient(XrdFilterError):
    exit_code = EXIT_NUMERICAL
    code = "RANK_DEFICIENT"
