"""Shared fixtures: small boxes and point-set helpers."""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from fractions import Fraction

import pytest

from few_distance_box.models import Box, PointSet
from few_distance_box.services.geometry import distance_palette, squared_distance


def make_points(box: Box, *coords: Sequence[int | str | Fraction]) -> PointSet:
    return PointSet(box, tuple(tuple(Fraction(c) for c in p) for p in coords))


def brute_force_max(box: Box, s: int) -> tuple[int, tuple[tuple[Fraction, ...], ...]]:
    """(maximum size, lexicographically least maximum) by plain subset enumeration."""
    points = list(box.points())
    dist = [[squared_distance(a, b) for b in points] for a in points]

    def fits(combo: tuple[int, ...]) -> bool:
        seen: set[Fraction] = set()
        for i, j in itertools.combinations(combo, 2):
            seen.add(dist[i][j])
            if len(seen) > s:
                return False
        return True

    for k in range(len(points), 0, -1):
        for combo in itertools.combinations(range(len(points)), k):
            if fits(combo):
                witness = tuple(points[i] for i in combo)
                assert len(distance_palette(PointSet(box, witness))) <= s
                return k, witness
    raise AssertionError("a single point is always a 0-distance set")


@pytest.fixture
def square() -> Box:
    return Box.grid(2, 2)


@pytest.fixture
def cube() -> Box:
    return Box.grid(3, 2)


@pytest.fixture
def grid_3x3() -> Box:
    return Box.grid(2, 3)


@pytest.fixture
def uneven_box() -> Box:
    """Non-grid box: the first axis is not an arithmetic progression."""
    return Box(
        (
            (Fraction(0), Fraction(1), Fraction(3)),
            (Fraction(0), Fraction(1, 2), Fraction(1)),
        )
    )
