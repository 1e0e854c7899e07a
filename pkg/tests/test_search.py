"""Extremal search: exactness, lexicographic witnesses, determinism, symmetry."""

from __future__ import annotations

from fractions import Fraction

import pytest

from few_distance_box.config import PALETTE_ENUMERATION_LIMIT
from few_distance_box.models import (
    Box,
    PaletteMode,
    SearchConfig,
    SearchMode,
    SquaredDistancePalette,
)
from few_distance_box.services.geometry import is_s_distance_set
from few_distance_box.services.search import (
    box_orbits,
    conjecture_probe,
    global_palette,
    greedy_s_distance_set,
    max_clique_for_palette,
    search_max,
)
from tests.conftest import brute_force_max

F = Fraction

SMALL_BOXES = [
    Box.grid(1, 3),
    Box.grid(1, 4),
    Box.grid(2, 2),
    Box.grid(3, 2),
    Box.grid(2, 3),
    Box.grid(4, 2),
    Box.grid(2, 4),
    Box(((F(0), F(1), F(3)), (F(0), F(1, 2), F(1)))),
]

# pure dynamic DFS, the default dispatch, and one clique search per palette
SEARCH_ROUTES = [
    SearchConfig(palette_enumeration_limit=0),
    SearchConfig(),
    SearchConfig(palette_mode=PaletteMode.ENUMERATE),
]


def test_global_palette_examples() -> None:
    assert global_palette(Box.grid(2, 2)).values == (F(1), F(2))
    assert global_palette(Box.grid(1, 3)).values == (F(1), F(4))
    assert global_palette(Box.grid(2, 3)).values == (F(1), F(2), F(4), F(5), F(8))


@pytest.mark.parametrize(
    ("box", "s", "expected"),
    [
        (Box.grid(2, 2), 1, 2),
        (Box.grid(3, 2), 1, 4),
        (Box.grid(3, 2), 3, 8),
        (Box.grid(4, 2), 4, 16),
    ],
)
def test_search_examples(box: Box, s: int, expected: int) -> None:
    result = search_max(box, s)
    assert result.best_size == expected
    assert result.optimal and result.completed
    assert is_s_distance_set(result.witness, s)


def test_cube_witness_is_least_parity_class() -> None:
    result = search_max(Box.grid(3, 2), 1)
    assert result.witness.points == (
        (F(0), F(0), F(0)),
        (F(0), F(1), F(1)),
        (F(1), F(0), F(1)),
        (F(1), F(1), F(0)),
    )
    assert result.palette_of_witness.values == (F(2),)


@pytest.mark.parametrize("box", SMALL_BOXES, ids=lambda b: f"n{b.n}q{b.q}")
def test_search_matches_brute_force(box: Box) -> None:
    for s in range(1, len(global_palette(box)) + 1):
        size, witness = brute_force_max(box, s)
        for cfg in SEARCH_ROUTES:
            result = search_max(box, s, cfg)
            assert result.best_size == size, (s, cfg)
            assert result.witness.points == witness, (s, cfg)
            assert result.optimal


@pytest.mark.parametrize("box", SMALL_BOXES, ids=lambda b: f"n{b.n}q{b.q}")
def test_symmetry_reduction_keeps_witness(box: Box) -> None:
    for s in range(1, len(global_palette(box))):
        with_sym = search_max(box, s, SearchConfig(symmetry_reduction=True))
        without = search_max(box, s, SearchConfig(symmetry_reduction=False))
        assert with_sym.witness == without.witness
        assert with_sym.orbit_count <= without.orbit_count == box.size


def test_results_independent_of_worker_count() -> None:
    box = Box.grid(2, 4)
    for symmetry in (True, False):
        single = search_max(box, 2, SearchConfig(symmetry_reduction=symmetry, worker_count=1))
        pooled = search_max(box, 2, SearchConfig(symmetry_reduction=symmetry, worker_count=4))
        assert single == pooled


def test_node_budget_degrades_to_anytime() -> None:
    box = Box.grid(2, 4)
    result = search_max(box, 2, SearchConfig(node_budget=1, palette_enumeration_limit=0))
    assert not result.completed
    assert not result.optimal
    assert is_s_distance_set(result.witness, 2)
    assert result.best_size >= 1


@pytest.mark.parametrize("limit", [0, PALETTE_ENUMERATION_LIMIT])
def test_node_budget_is_never_exceeded(limit: int) -> None:
    results = [
        search_max(
            Box.grid(2, 5),
            3,
            SearchConfig(
                node_budget=50,
                symmetry_reduction=False,
                palette_enumeration_limit=limit,
                worker_count=workers,
            ),
        )
        for workers in (1, 3)
    ]
    for result in results:
        assert result.nodes_explored <= 50
        assert is_s_distance_set(result.witness, 3)
        if limit == 0:
            assert not result.optimal
    assert results[0] == results[1]


def test_palette_dispatch_independent_of_worker_count() -> None:
    box = Box.grid(3, 2)
    for s in (2, 3):
        single = search_max(box, s, SearchConfig(worker_count=1))
        pooled = search_max(box, s, SearchConfig(worker_count=3))
        assert single == pooled


@pytest.mark.parametrize(
    ("n", "q"),
    [(2, 2), (3, 2), (4, 2), (5, 2), (6, 2), (2, 3), (3, 3), (2, 4), (2, 5)],
)
def test_default_search_is_exact_on_small_grids(n: int, q: int) -> None:
    from few_distance_box.services.bounds import main_theorem_bound

    box = Box.grid(n, q)
    sizes = []
    for s in range(1, len(global_palette(box)) + 1):
        result = search_max(box, s)
        assert result.optimal, s
        assert result.best_size <= main_theorem_bound(n, q, s)
        sizes.append(result.best_size)
    assert sizes == sorted(sizes)
    assert sizes[-1] == box.size


def test_anytime_search_streams_boxes_too_large_to_tabulate() -> None:
    box = Box.grid(13, 2)
    result = search_max(box, 2, SearchConfig(mode=SearchMode.ANYTIME))
    assert not result.optimal
    assert result.nodes_explored == box.size
    assert result.best_size >= 3
    assert is_s_distance_set(result.witness, 2)
    assert result.witness == greedy_s_distance_set(box, 2)

    capped = search_max(box, 2, SearchConfig(mode=SearchMode.ANYTIME, node_budget=10))
    assert capped.nodes_explored == 10 and not capped.completed

    with pytest.raises(ValueError):
        search_max(box, 2)


def test_anytime_mode_never_claims_optimality() -> None:
    result = search_max(Box.grid(2, 2), 1, SearchConfig(mode=SearchMode.ANYTIME))
    assert result.completed
    assert not result.optimal
    assert result.best_size == 2


def test_search_rejects_bad_s() -> None:
    with pytest.raises(ValueError):
        search_max(Box.grid(2, 2), 0)


def test_greedy_seed_is_valid() -> None:
    seed = greedy_s_distance_set(Box.grid(3, 3), 2)
    assert is_s_distance_set(seed, 2)
    assert seed.points[0] == (F(0), F(0), F(0))


@pytest.mark.parametrize(
    ("box", "expected"),
    [
        (Box.grid(2, 2), 1),
        (Box.grid(1, 3), 2),
        (Box(((F(0), F(1), F(3)),)), 3),
        (Box(((F(0), F(1)), (F(0), F(2)))), 1),
        (Box.grid(2, 3), 3),
    ],
)
def test_box_orbit_counts(box: Box, expected: int) -> None:
    orbits = box_orbits(box)
    assert len(orbits) == expected
    assert sorted(i for orbit in orbits for i in orbit) == list(range(box.size))


def test_orbits_preserve_distance_profiles() -> None:
    box = Box.grid(2, 3)
    points = list(box.points())
    for orbit in box_orbits(box):
        profiles = {_distance_profile(points[i], points) for i in orbit}
        assert len(profiles) == 1


def _distance_profile(a, universe) -> tuple[Fraction, ...]:
    return tuple(sorted(sum((x - y) ** 2 for x, y in zip(a, b)) for b in universe))


@pytest.mark.parametrize(
    ("box", "palette", "expected"),
    [
        (Box.grid(3, 2), (2,), 4),
        (Box.grid(2, 2), (1,), 2),
        (Box.grid(2, 3), (1, 2, 4, 5, 8), 9),
    ],
)
def test_max_clique_for_palette(box: Box, palette: tuple[int, ...], expected: int) -> None:
    result = max_clique_for_palette(box, SquaredDistancePalette(tuple(F(v) for v in palette)))
    assert result.best_size == expected
    assert set(result.palette_of_witness) <= {F(v) for v in palette}


def test_max_clique_rejects_foreign_palette() -> None:
    with pytest.raises(ValueError):
        max_clique_for_palette(Box.grid(2, 2), SquaredDistancePalette((F(3),)))


def test_probe_tight_on_cube() -> None:
    report = conjecture_probe(3, 2, 1)
    assert report.best_size == 4
    assert report.conjectured_cap == 4
    assert report.theorem_cap == 8
    assert report.conjecture_consistent and report.theorem_consistent


def test_probe_slack_on_square() -> None:
    report = conjecture_probe(2, 2, 1)
    assert (report.best_size, report.conjectured_cap, report.theorem_cap) == (2, 3, 6)
    assert report.bbs_cap == 3


def test_probe_saturated() -> None:
    report = conjecture_probe(2, 3, 5)
    assert report.best_size == 9 == report.conjectured_cap


def test_probe_rejects_box_mismatch() -> None:
    with pytest.raises(ValueError):
        conjecture_probe(2, 3, 1, box=Box.grid(2, 2))


def test_theorem_sandwich_on_small_grids() -> None:
    from few_distance_box.services.bounds import main_theorem_bound

    for n, q in [(1, 2), (1, 5), (2, 2), (2, 3), (3, 2), (2, 4), (4, 2)]:
        box = Box.grid(n, q)
        for s in range(1, len(global_palette(box)) + 1):
            result = search_max(box, s)
            assert result.best_size <= main_theorem_bound(n, q, s)
