"""Lower-bound constructions and their validation."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

from few_distance_box.models import Box, ConstructionReport, PointSet, SquaredDistancePalette
from few_distance_box.services.search import global_palette


def characteristic_vector_set(n: int, s: int) -> ConstructionReport:
    """Indicator vectors of all s-subsets of {1..n}, inside {0,1}^n.

    Two such vectors differ in |A xor B| = 2k coordinates, k = 1..min(s, n-s),
    so the palette is {2, 4, ..., 2 min(s, n-s)} and has exactly s values iff s <= n/2.
    """
    if not 0 < s <= n:
        raise ValueError(f"Need 0 < s <= n, got n={n}, s={s}")
    one, zero = Fraction(1), Fraction(0)
    vectors = sorted(
        tuple(one if i in subset else zero for i in range(n))
        for subset in itertools.combinations(range(n), s)
    )
    # squared distance between 0/1 vectors is the popcount of the xor of their masks
    masks = [sum(1 << i for i, v in enumerate(vector) if v) for vector in vectors]
    distances = {bin(a ^ b).count("1") for a, b in itertools.combinations(masks, 2)}
    palette = SquaredDistancePalette(tuple(Fraction(d) for d in distances))
    if len(palette) > s:
        raise RuntimeError(f"Characteristic vectors realise {len(palette)} > {s} distances")
    return ConstructionReport(
        name="charvec",
        points=PointSet(Box.grid(n, 2), tuple(vectors)),
        claimed_size=math.comb(n, s),
        palette=palette,
        s_achieved=len(palette),
    )


def full_box_report(box: Box) -> ConstructionReport:
    """The whole box, an s-distance set for s = |global palette|."""
    palette = global_palette(box)
    return ConstructionReport(
        name="box",
        points=PointSet(box, tuple(box.points())),
        claimed_size=box.size,
        palette=palette,
        s_achieved=len(palette),
    )
