"""Small numeric helpers shared across modules."""

from __future__ import annotations

import math
from fractions import Fraction

_MANTISSA_BITS = 53
_LOG2 = math.log(2.0)


def log_int(value: int) -> float:
    """Natural log of a positive integer of arbitrary size.

    Large integers are reduced to a 53-bit mantissa plus an exact power-of-two
    exponent, so the result stays accurate far beyond the float range.
    """
    if value <= 0:
        raise ValueError("log_int requires a positive integer")
    shift = value.bit_length() - _MANTISSA_BITS
    if shift <= 0:
        return math.log(value)
    return math.log(value >> shift) + shift * _LOG2


def log_fraction(value: Fraction) -> float:
    """Natural log of a positive rational of arbitrary size."""
    if value <= 0:
        raise ValueError("log_fraction requires a positive rational")
    return log_int(value.numerator) - log_int(value.denominator)


def normal_cdf(y: float) -> float:
    """Standard normal CDF, via the C library erf (plumbing only)."""
    return 0.5 * (1.0 + math.erf(y / math.sqrt(2.0)))


def pearson_from_exact(cov: Fraction, var_x: Fraction, var_y: Fraction):
    """Correlation coefficient from exact second moments.

    Returns None when either variance vanishes (degenerate case). The float
    is produced through logs so huge rationals never overflow.
    """
    if var_x == 0 or var_y == 0:
        return None
    if cov == 0:
        return 0.0
    sign = 1.0 if cov > 0 else -1.0
    return sign * math.exp(
        log_fraction(abs(cov)) - 0.5 * (log_fraction(var_x) + log_fraction(var_y))
    )
