"""Witness polynomials P(x_1..x_n, y_1..y_n) over the rationals.

A witness for F must satisfy
  (i)  P(a, a) != 0 for every a in F,
  (ii) P(a, b) == 0 for all distinct a, b in F,
and then |F| <= 2 * M(n, t, floor(deg P / 2)) and |F| <= 2 (t J(t, 2n(t-1)/deg P))^n.

Terms are kept in a dict keyed by exponent vectors; no monomial order is assumed.
"""

from __future__ import annotations

import concurrent.futures
import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from few_distance_box.config import DEFAULT_TOL
from few_distance_box.models import (
    ClpCheckResult,
    ClpStatus,
    DimensionMismatchError,
    Point,
    PointSet,
    SquaredDistancePalette,
    WitnessCheckResult,
)
from few_distance_box.services.bounds import clp_threshold, count_monomials, maincor2_bound

Exponents = tuple[int, ...]
Coefficient = Union[Fraction, int]


@dataclass(frozen=True)
class MultiPoly:
    """Sparse polynomial with exact rational coefficients.

    Witness polynomials use nvars = 2n: x-variables first, then y-variables.
    Zero coefficients are never stored; the zero polynomial has total_degree 0.
    """

    nvars: int
    terms: Mapping[Exponents, Fraction]
    total_degree: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.nvars < 0:
            raise ValueError(f"nvars must be >= 0, got {self.nvars}")
        cleaned: dict[Exponents, Fraction] = {}
        for exps, coef in self.terms.items():
            key = tuple(int(e) for e in exps)
            if len(key) != self.nvars:
                raise DimensionMismatchError(
                    f"Exponent vector {key} has length {len(key)}, expected {self.nvars}"
                )
            if any(e < 0 for e in key):
                raise ValueError(f"Negative exponent in {key}")
            value = cleaned.get(key, Fraction(0)) + Fraction(coef)
            if value:
                cleaned[key] = value
            else:
                cleaned.pop(key, None)
        object.__setattr__(self, "terms", cleaned)
        object.__setattr__(
            self, "total_degree", max((sum(e) for e in cleaned), default=0)
        )

    @classmethod
    def zero(cls, nvars: int) -> MultiPoly:
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value: Coefficient) -> MultiPoly:
        return cls(nvars, {(0,) * nvars: Fraction(value)})

    @classmethod
    def variable(cls, nvars: int, index: int) -> MultiPoly:
        if not 0 <= index < nvars:
            raise ValueError(f"Variable index {index} out of range for {nvars} variables")
        exps = tuple(1 if i == index else 0 for i in range(nvars))
        return cls(nvars, {exps: Fraction(1)})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_multilinear(self) -> bool:
        return all(e <= 1 for exps in self.terms for e in exps)

    def __add__(self, other: MultiPoly | Coefficient) -> MultiPoly:
        other = self._coerce(other)
        merged = dict(self.terms)
        for exps, coef in other.terms.items():
            merged[exps] = merged.get(exps, Fraction(0)) + coef
        return MultiPoly(self.nvars, merged)

    def __radd__(self, other: Coefficient) -> MultiPoly:
        return self + other

    def __neg__(self) -> MultiPoly:
        return MultiPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: MultiPoly | Coefficient) -> MultiPoly:
        return self + (-self._coerce(other))

    def __mul__(self, other: MultiPoly | Coefficient) -> MultiPoly:
        other = self._coerce(other)
        product: dict[Exponents, Fraction] = {}
        for (e1, c1), (e2, c2) in itertools.product(self.terms.items(), other.terms.items()):
            exps = tuple(a + b for a, b in zip(e1, e2))
            product[exps] = product.get(exps, Fraction(0)) + c1 * c2
        return MultiPoly(self.nvars, product)

    def __rmul__(self, other: Coefficient) -> MultiPoly:
        return self * other

    def evaluate_at(self, values: Sequence[Fraction]) -> Fraction:
        """Exact value at a point of F^nvars."""
        if len(values) != self.nvars:
            raise DimensionMismatchError(
                f"Polynomial has {self.nvars} variables, got {len(values)} values"
            )
        total = Fraction(0)
        for exps, coef in self.terms.items():
            term = coef
            for v, e in zip(values, exps):
                if e:
                    term *= v**e
            total += term
        return total

    def _coerce(self, other: MultiPoly | Coefficient) -> MultiPoly:
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise DimensionMismatchError(
                    f"Cannot combine polynomials in {self.nvars} and {other.nvars} variables"
                )
            return other
        return MultiPoly.constant(self.nvars, other)


def build_distance_polynomial(n: int, palette: SquaredDistancePalette) -> MultiPoly:
    """prod_i ( sum_j (x_j - y_j)^2 - d_i^2 ), palette values being the d_i^2.

    Total degree is exactly 2 * |palette|.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if len(palette) == 0:
        raise ValueError("Cannot build a distance polynomial from an empty palette")
    nvars = 2 * n
    squared_norm = MultiPoly.zero(nvars)
    for j in range(n):
        diff = MultiPoly.variable(nvars, j) - MultiPoly.variable(nvars, n + j)
        squared_norm = squared_norm + diff * diff
    result = MultiPoly.constant(nvars, 1)
    for value in palette:
        result = result * (squared_norm - value)
    return result


def evaluate(poly: MultiPoly, a: Point, b: Point) -> Fraction:
    """P(a; b) for a witness polynomial in 2n variables."""
    if len(a) != len(b):
        raise DimensionMismatchError(f"Points differ in dimension: {len(a)} vs {len(b)}")
    if poly.nvars != 2 * len(a):
        raise DimensionMismatchError(
            f"Polynomial has {poly.nvars} variables, points need {2 * len(a)}"
        )
    return poly.evaluate_at(tuple(a) + tuple(b))


def verify_witness(
    poly: MultiPoly,
    points: PointSet,
    t: int,
    tol: float = DEFAULT_TOL,
    workers: int = 1,
) -> WitnessCheckResult:
    """Check conditions (i) and (ii) and report both witness bounds.

    Condition (ii) runs over ordered pairs of distinct points in lexicographic
    order; with workers > 1 the pairs are split into contiguous chunks and the
    earliest violating pair wins, so the report matches a sequential run.
    """
    if points.box.q != t:
        raise ValueError(f"Box has coordinate sets of size {points.box.q}, expected t={t}")
    n = points.n
    if poly.nvars != 2 * n:
        raise DimensionMismatchError(
            f"Witness polynomial has {poly.nvars} variables, expected {2 * n}"
        )
    ordered = sorted(points.points)

    violation: tuple[Point, Point] | None = None
    diagonal_bad = next((a for a in ordered if evaluate(poly, a, a) == 0), None)
    condition_i_ok = diagonal_bad is None
    if diagonal_bad is not None:
        violation = (diagonal_bad, diagonal_bad)

    pairs = [(a, b) for a in ordered for b in ordered if a != b]
    first_bad = _first_nonvanishing(poly, pairs, workers)
    condition_ii_ok = first_bad is None
    if violation is None and first_bad is not None:
        violation = pairs[first_bad]

    degree = poly.total_degree
    return WitnessCheckResult(
        condition_i_ok=condition_i_ok,
        condition_ii_ok=condition_ii_ok,
        first_violation=violation,
        bound_maincor=2 * count_monomials(n, t, degree // 2),
        bound_maincor2=maincor2_bound(n, t, degree, tol) if degree >= 1 else None,
        degree=degree,
        n=n,
        t=t,
        size=len(points),
    )


def clp_check(poly: MultiPoly, points: PointSet) -> ClpCheckResult:
    """Test "P(a - b) = 0 for all distinct a, b and |F| > threshold  =>  P(0) = 0".

    `poly` is a multilinear polynomial in n variables. An instance whose
    hypotheses fail is reported as such, not raised.
    """
    n = points.n
    if poly.nvars != n:
        raise DimensionMismatchError(f"Polynomial has {poly.nvars} variables, expected {n}")
    if not poly.is_multilinear:
        raise ValueError("clp_check needs a multilinear polynomial (all exponents <= 1)")

    threshold = clp_threshold(n, poly.total_degree)
    vanish = all(
        poly.evaluate_at(_difference(a, b)) == 0
        for a, b in itertools.permutations(points.points, 2)
    )
    at_zero = poly.evaluate_at((Fraction(0),) * n)

    if not (vanish and len(points) > threshold):
        status = ClpStatus.HYPOTHESES_NOT_MET
    elif at_zero == 0:
        status = ClpStatus.CONCLUSION_HOLDS
    else:
        status = ClpStatus.COUNTEREXAMPLE
    return ClpCheckResult(
        status=status,
        threshold=threshold,
        degree=poly.total_degree,
        size=len(points),
        value_at_zero=at_zero,
        differences_vanish=vanish,
    )


# ---------------------------------------------------------------------------
# Private helpers
# ---------------------------------------------------------------------------


def _difference(a: Point, b: Point) -> Point:
    return tuple(x - y for x, y in zip(a, b))


def _first_nonvanishing(
    poly: MultiPoly,
    pairs: list[tuple[Point, Point]],
    workers: int,
) -> int | None:
    """Index of the first pair with P(a, b) != 0, or None.

    With workers > 1 the pairs are cut into contiguous chunks, each scanned in
    its own process; the smallest reported index wins.
    """
    if workers <= 1 or len(pairs) < 2 * workers:
        return _scan_pairs(poly, pairs, 0)

    step = -(-len(pairs) // workers)
    offsets = list(range(0, len(pairs), step))
    chunks = [pairs[lo:lo + step] for lo in offsets]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        hits = list(executor.map(_scan_pairs, [poly] * len(chunks), chunks, offsets))
    found = [k for k in hits if k is not None]
    return min(found) if found else None


def _scan_pairs(poly: MultiPoly, pairs: list[tuple[Point, Point]], offset: int) -> int | None:
    for k, (a, b) in enumerate(pairs):
        if evaluate(poly, a, b) != 0:
            return offset + k
    return None
