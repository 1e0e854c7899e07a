"""Outward-rounded arithmetic on RealInterval.

Every operation steps its lower end toward -inf and its upper end toward
+inf with math.nextafter, so a computed interval contains the exact result.
Only nonnegative intervals are needed by the bounds, and only those are supported
by `mul` and `power`.
"""

from __future__ import annotations

import math

from few_distance_box.config import ULP_SLACK
from few_distance_box.models import RealInterval


def down(x: float, ulps: int = ULP_SLACK) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, -math.inf)
    return x


def up(x: float, ulps: int = ULP_SLACK) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, math.inf)
    return x


def enclose(lower: float, upper: float) -> RealInterval:
    """Interval [lower, upper] widened by the configured ulp slack."""
    return RealInterval(down(lower), up(upper))


def exact(value: float) -> RealInterval:
    return RealInterval(value, value)


def scale(iv: RealInterval, factor: float) -> RealInterval:
    if factor < 0:
        raise ValueError("scale() expects a nonnegative factor")
    return RealInterval(down(iv.lower * factor, 1), up(iv.upper * factor, 1))


def mul(a: RealInterval, b: RealInterval) -> RealInterval:
    _require_nonnegative(a)
    _require_nonnegative(b)
    return RealInterval(down(a.lower * b.lower, 1), up(a.upper * b.upper, 1))


def power(iv: RealInterval, exponent: int) -> RealInterval:
    """iv ** exponent by repeated squaring, rounding outward at each step."""
    _require_nonnegative(iv)
    if exponent < 0:
        raise ValueError("power() expects a nonnegative exponent")
    result = exact(1.0)
    base = iv
    while exponent:
        if exponent & 1:
            result = mul(result, base)
        exponent >>= 1
        if exponent:
            base = mul(base, base)
    return result


def _require_nonnegative(iv: RealInterval) -> None:
    if iv.lower < 0:
        raise ValueError(f"Interval {iv} must be nonnegative")
