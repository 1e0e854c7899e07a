"""Cardinality bounds for s-distance and s-scalar-product sets.

Combinatorial bounds are exact Python ints. Bounds that go through J(t, d)
are RealInterval enclosures, so comparisons against search results stay sound.

Key quantity: M(n, q, s), the number of monomials x^alpha with
0 <= alpha_i <= q-1 and sum(alpha) <= s.
"""

from __future__ import annotations

import math
from fractions import Fraction

from few_distance_box.config import DEFAULT_TOL
from few_distance_box.models import BoundReport, JParams, RealInterval
from few_distance_box.services import interval
from few_distance_box.services.j_constant import compute_J


def count_monomials(n: int, q: int, s: int) -> int:
    """M(n, q, s) by a truncated DP over coordinates.

    counts[k] = number of exponent vectors over the coordinates seen so far
    with sum exactly k; each coordinate convolves with the length-q all-ones
    sequence, truncated at s. Runs in O(n * s) with prefix sums.
    """
    _require(n >= 1, f"n must be >= 1, got {n}")
    _require(q >= 2, f"q must be >= 2, got {q}")
    _require(s >= 0, f"s must be >= 0, got {s}")
    cap = min(s, n * (q - 1))
    counts = [1] + [0] * cap
    for _ in range(n):
        prefix = [0]
        for value in counts:
            prefix.append(prefix[-1] + value)
        # new[k] = sum_{j=0}^{min(k, q-1)} counts[k - j]
        counts = [prefix[k + 1] - prefix[max(0, k - q + 1)] for k in range(cap + 1)]
    return sum(counts)


def bbs_bound(n: int, s: int) -> int:
    """C(n+s, s): any s-distance set in R^n."""
    _require(n >= 1, f"n must be >= 1, got {n}")
    _require(s >= 0, f"s must be >= 0, got {s}")
    return math.comb(n + s, s)


def dgs_bound(n: int, s: int) -> int:
    """C(n+s-1, s) + C(n+s-2, s-1): spherical s-distance sets on S^(n-1)."""
    _require(n >= 2, f"The spherical bound needs n >= 2, got {n}")
    _require(s >= 1, f"The spherical bound needs s >= 1, got {s}")
    return math.comb(n + s - 1, s) + math.comb(n + s - 2, s - 1)


def deza_frankl_bound(n: int, s: int) -> int:
    """C(n+s, s) for sets with at most s scalar products (same formula as bbs_bound)."""
    return bbs_bound(n, s)


def clp_threshold(n: int, d: int) -> int:
    """2 * sum_{i=0}^{floor(d/2)} C(n, i)."""
    _require(n >= 1, f"n must be >= 1, got {n}")
    _require(d >= 0, f"d must be >= 0, got {d}")
    return 2 * sum(math.comb(n, i) for i in range(d // 2 + 1))


def main_theorem_bound(n: int, q: int, s: int) -> int:
    """2 * M(n, q, s): s-distance sets in a box with |A_i| = q."""
    return 2 * count_monomials(n, q, s)


def dfrank_box_bound(n: int, q: int, s: int) -> int:
    """M(n, q, s): box sets satisfying the scalar-product conditions (no factor 2)."""
    return count_monomials(n, q, s)


def corollary_bound(n: int, q: int, s: int, tol: float = DEFAULT_TOL) -> RealInterval:
    """Enclosure of 2 * (q * J(q, d))^n with d = n(q-1)/s."""
    _require(s >= 1, f"The J-based bound needs s >= 1, got {s}")
    _require(n >= 1, f"n must be >= 1, got {n}")
    return _j_power_bound(n, q, Fraction(n * (q - 1), s), tol)


def maincor2_bound(n: int, t: int, deg_p: int, tol: float = DEFAULT_TOL) -> RealInterval:
    """Enclosure of 2 * (t * J(t, d))^n with d = 2n(t-1)/deg(P)."""
    _require(deg_p >= 1, f"The witness bound needs deg(P) >= 1, got {deg_p}")
    _require(n >= 1, f"n must be >= 1, got {n}")
    return _j_power_bound(n, t, Fraction(2 * n * (t - 1), deg_p), tol)


def bound_table(n: int, q: int, s: int, tol: float = DEFAULT_TOL) -> list[BoundReport]:
    """Every applicable bound for one (n, q, s) cell.

    Out-of-range parameters are recorded on the individual report instead of raised.
    """
    params = {"n": n, "q": q, "s": s}
    cells = [
        ("bbs", lambda: bbs_bound(n, s)),
        ("dgs", lambda: dgs_bound(n, s)),
        ("deza_frankl", lambda: deza_frankl_bound(n, s)),
        ("main_theorem", lambda: main_theorem_bound(n, q, s)),
        ("dfrank_box", lambda: dfrank_box_bound(n, q, s)),
        ("corollary", lambda: corollary_bound(n, q, s, tol)),
        ("clp_threshold", lambda: clp_threshold(n, 2 * s)),
    ]
    reports: list[BoundReport] = []
    for name, evaluate in cells:
        try:
            reports.append(BoundReport(name=name, params=params, value=evaluate()))
        except (ValueError, ArithmeticError) as exc:
            reports.append(BoundReport(name=name, params=params, value=None, error=str(exc)))
    return reports


# ---------------------------------------------------------------------------
# Private helpers
# ---------------------------------------------------------------------------


def _j_power_bound(n: int, t: int, d: Fraction, tol: float) -> RealInterval:
    j = compute_J(JParams(t, d), tol)
    scaled = interval.scale(j.interval, float(t))
    return interval.scale(interval.power(scaled, n), 2.0)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(message)
