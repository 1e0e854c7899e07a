"""Exact geometry over rational boxes.

Distances are stored squared: for rational points the squared distance is
rational and t -> t^2 is injective on t >= 0, so |d(F)| equals the size of
the squared-distance palette.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from few_distance_box.models import (
    DimensionMismatchError,
    Point,
    PointSet,
    ScalarProductSet,
    SquaredDistancePalette,
)


def squared_distance(a: Point, b: Point) -> Fraction:
    """Return sum_j (a_j - b_j)^2, exact."""
    _check_dims(a, b)
    return sum(((x - y) ** 2 for x, y in zip(a, b)), Fraction(0))


def scalar_product(a: Point, b: Point) -> Fraction:
    _check_dims(a, b)
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def distance_palette(points: PointSet) -> SquaredDistancePalette:
    """Distinct squared distances over unordered pairs of distinct points.

    Raises ValueError for an empty point set; a single point gives the empty palette.
    """
    if len(points) == 0:
        raise ValueError("distance_palette needs at least one point")
    values = {
        squared_distance(a, b) for a, b in itertools.combinations(points.points, 2)
    }
    return SquaredDistancePalette(tuple(values))


def is_s_distance_set(points: PointSet, s: int) -> bool:
    if len(points) == 0:
        return True
    return len(distance_palette(points)) <= s


def scalar_product_set(points: PointSet) -> ScalarProductSet:
    """s(F): inner products between distinct points (symmetric, so pairs are unordered)."""
    values = {scalar_product(a, b) for a, b in itertools.combinations(points.points, 2)}
    return ScalarProductSet(tuple(values))


def check_df_conditions(points: PointSet, s: int) -> bool:
    """Both hypotheses of the box scalar-product bound.

    (i)  (f, f) is not in s(F) for any f in F;
    (ii) |s(F)| <= s.
    """
    products = scalar_product_set(points)
    if len(products) > s:
        return False
    return all(scalar_product(f, f) not in products for f in points)


def _check_dims(a: Point, b: Point) -> None:
    if len(a) != len(b):
        raise DimensionMismatchError(f"Dimension mismatch: {len(a)} vs {len(b)}")
