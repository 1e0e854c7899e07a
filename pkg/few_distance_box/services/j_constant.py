"""Certified enclosures of J(t, d) and of lim_{t->inf} J(t, 3).

    J(t, d) = inf_{0<x<1} f(x),   f(x) = (1/t) * (1 + x + ... + x^(t-1)) * x^(-(t-1)/d)

f is evaluated through the polynomial form of (1 - x^t)/(1 - x), so x = 1 is a
removable point with f(1) = 1. d may be any positive real.

Pipeline for one call:
  1. derivative-sign sweep of log f on a uniform grid of (0, hi]; the sign
     pattern must be (-...-, +...+), otherwise the grid is refined;
  2. the first cell where the slope turns positive brackets the minimiser
     (if the very first cell does, the scan zooms toward x = 0);
  3. golden-section search shrinks the bracket until the enclosure is tight.

The lower end of the enclosure uses monotone splitting on the final bracket
[a, b]: S(x) is increasing and x^-c decreasing, so f >= S(a) * b^-c / t on [a, b],
and unimodality puts every value outside the bracket above that too.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly

from few_distance_box.config import (
    COARSE_GRID_POINTS,
    DEFAULT_TOL,
    GOLDEN_MAX_ITER,
    J3_RANGE,
    J_LIMIT_MAX_DOUBLINGS,
    J_LIMIT_START_ZMAX,
    MAX_GRID_POINTS,
    ZOOM_MAX_DEPTH,
)
from few_distance_box.models import JParams, JValue, RealInterval, RealLike
from few_distance_box.services.interval import down, enclose

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class EnclosureError(RuntimeError):
    """The minimum could not be enclosed within the iteration budget."""


def compute_J(params: JParams, tol: float = DEFAULT_TOL) -> JValue:
    """Enclose J(t, d) in [lower, upper] with upper - lower <= tol.

    When the infimum is only approached as x -> 1 (d <= 2) the result is 1
    with attained_interior=False.
    """
    if not tol > 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")
    t = params.t
    c = (t - 1) / float(params.d)
    # sign of (d/dx) log f at x = 1 is the sign of (t-1)(1/2 - 1/d), i.e. of d - 2
    boundary_slope = 1.0 if params.d > 2 else -1.0

    bracket = _bracket_minimum(
        slope=lambda xs: _log_f_slope(xs, t, c),
        lo=0.0,
        hi=1.0,
        right_slope=boundary_slope,
    )
    if bracket is None:
        return JValue(lower=down(1.0), upper=1.0, argmin_estimate=1.0, attained_interior=False)

    a, b = bracket
    lower, upper, argmin = _golden_enclosure(
        fn=lambda x: _f(x, t, c),
        cell_lower=lambda lo, hi: _poly_sum(lo, t) * hi ** (-c) / t,
        a=a,
        b=b,
        tol=tol,
    )
    # the boundary value 1 is always available as x -> 1
    upper = min(upper, 1.0)
    return JValue(
        lower=lower,
        upper=upper,
        argmin_estimate=min(argmin, 1.0),
        attained_interior=True,
    )


def j_curve(
    t_values: Sequence[int], d: RealLike = 3, tol: float = DEFAULT_TOL
) -> list[JValue]:
    """J(t, d) for each t, in the order given."""
    return [compute_J(JParams(t, d), tol) for t in t_values]


def j_limit_d3(tol: float = DEFAULT_TOL) -> RealInterval:
    """Enclose inf_{z>1} (z - z^-2) / (3 log z), the t -> infinity limit of J(t, 3).

    The scan starts on (1, 4] and doubles the right end until the minimum is interior.
    """
    zmax = J_LIMIT_START_ZMAX
    for _ in range(J_LIMIT_MAX_DOUBLINGS):
        bracket = _bracket_minimum(slope=_limit_slope, lo=1.0, hi=zmax, right_slope=None)
        if bracket is not None:
            break
        zmax *= 2.0
    else:
        raise EnclosureError("Limit minimum did not become interior")

    a, b = bracket
    lower, upper, _ = _golden_enclosure(
        fn=_limit_fn,
        cell_lower=lambda lo, hi: (lo - lo**-2) / (3.0 * math.log(hi)),
        a=a,
        b=b,
        tol=tol,
    )
    return RealInterval(lower, upper)


def j_range_check(q: int, tol: float = DEFAULT_TOL) -> bool:
    """True when J(q, 3) lies in the quoted range [0.8414, 0.9184] (q >= 3 only)."""
    if q < 3:
        raise ValueError("The J(q) range is stated for q >= 3")
    value = compute_J(JParams(q, 3), tol)
    lo, hi = J3_RANGE
    return lo <= value.lower and value.upper <= hi + tol


# ---------------------------------------------------------------------------
# Private helpers
# ---------------------------------------------------------------------------


def _bracket_minimum(
    slope: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    right_slope: float | None,
) -> tuple[float, float] | None:
    """Bracket the minimiser of a unimodal function on (lo, hi].

    Returns None when the slope never turns positive, i.e. the infimum sits
    at the right end. `right_slope` overrides the slope at x = hi (used where
    the closed form at the removable point is known).
    """
    points = COARSE_GRID_POINTS
    for _ in range(ZOOM_MAX_DEPTH):
        xs = lo + (hi - lo) * np.arange(1, points + 1, dtype=float) / points
        with np.errstate(all="ignore"):
            signs = np.sign(slope(xs))
        if right_slope is not None:
            signs[-1] = np.sign(right_slope)
        if np.any(np.isnan(signs)) or np.any(np.diff(signs) < 0):
            if points >= MAX_GRID_POINTS:
                raise EnclosureError(
                    f"Slope sign pattern on ({lo}, {hi}] is not unimodal at {points} points"
                )
            points *= 2
            continue

        ascending = np.flatnonzero(signs > 0)
        if ascending.size == 0:
            return None
        i = int(ascending[0])
        if i > 0:
            return float(xs[i - 1]), float(xs[i])
        # minimiser lies in the first cell: zoom toward lo
        hi = float(xs[0])
        right_slope = None
    raise EnclosureError(f"Minimiser could not be bracketed away from {lo}")


def _golden_enclosure(
    fn: Callable[[float], float],
    cell_lower: Callable[[float, float], float],
    a: float,
    b: float,
    tol: float,
) -> tuple[float, float, float]:
    """Shrink [a, b] by golden section until cell_lower(a, b) is within tol of the best value.

    Returns (lower, upper, argmin) with the ulp slack already applied.
    """
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1 = fn(x1)
    f2 = fn(x2)
    for _ in range(GOLDEN_MAX_ITER):
        lower = cell_lower(a, b)
        upper = min(f1, f2)
        if upper - lower <= 0.5 * tol:
            argmin = x1 if f1 <= f2 else x2
            widened = enclose(lower, upper)
            return widened.lower, widened.upper, argmin
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = fn(x2)
    raise EnclosureError(
        f"Golden-section search did not reach tolerance {tol} in {GOLDEN_MAX_ITER} steps"
    )


def _poly_sum(x: float, t: int) -> float:
    """1 + x + ... + x^(t-1) by Horner's rule."""
    acc = 0.0
    for _ in range(t):
        acc = acc * x + 1.0
    return acc


def _f(x: float, t: int, c: float) -> float:
    return _poly_sum(x, t) * x ** (-c) / t


def _log_f_slope(xs: np.ndarray, t: int, c: float) -> np.ndarray:
    """(d/dx) log f = S'(x)/S(x) - c/x, same sign as f'."""
    coeffs = np.ones(t)
    s = npoly.polyval(xs, coeffs)
    ds = npoly.polyval(xs, npoly.polyder(coeffs))
    return np.asarray(ds / s - c / xs)


def _limit_fn(z: float) -> float:
    return (z - z**-2) / (3.0 * math.log(z))


def _limit_slope(zs: np.ndarray) -> np.ndarray:
    """Numerator of the derivative of (z - z^-2) / (3 log z); the denominator is positive."""
    inv3 = zs**-3
    return np.asarray((1.0 + 2.0 * inv3) * np.log(zs) - (1.0 - inv3))

