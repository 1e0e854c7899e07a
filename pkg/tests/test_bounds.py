"""Combinatorial bounds, J-based bound enclosures and bound tables."""

from __future__ import annotations

import itertools
import math
from collections import Counter

import pytest

from few_distance_box.models import RealInterval
from few_distance_box.services import interval
from few_distance_box.services.bounds import (
    bbs_bound,
    bound_table,
    clp_threshold,
    corollary_bound,
    count_monomials,
    deza_frankl_bound,
    dfrank_box_bound,
    dgs_bound,
    main_theorem_bound,
    maincor2_bound,
)


@pytest.mark.parametrize(
    ("n", "q", "s", "expected"),
    [(2, 2, 2, 4), (3, 3, 2, 10), (1, 5, 3, 4), (2, 2, 1, 3), (4, 3, 0, 1)],
)
def test_count_monomials_examples(n: int, q: int, s: int, expected: int) -> None:
    assert count_monomials(n, q, s) == expected


def test_count_monomials_matches_enumeration() -> None:
    for n in range(1, 6):
        for q in range(2, 5):
            sums = Counter(sum(v) for v in itertools.product(range(q), repeat=n))
            running = 0
            for s in range(n * (q - 1) + 1):
                running += sums[s]
                assert count_monomials(n, q, s) == running, (n, q, s)


def test_count_monomials_saturates_at_box_size() -> None:
    assert count_monomials(3, 4, 100) == 4**3


def test_count_monomials_rejects_bad_arguments() -> None:
    with pytest.raises(ValueError):
        count_monomials(0, 2, 1)
    with pytest.raises(ValueError):
        count_monomials(2, 1, 1)
    with pytest.raises(ValueError):
        count_monomials(2, 2, -1)


def test_count_monomials_complement_symmetry() -> None:
    # exponent vectors of sum k and of sum n(q-1) - k are in bijection
    for n in range(1, 6):
        for q in range(2, 5):
            top = n * (q - 1)
            for s in range(top):
                assert count_monomials(n, q, s) + count_monomials(n, q, top - s - 1) == q**n


def test_count_monomials_is_monotone_in_s() -> None:
    for n, q in itertools.product(range(1, 6), range(2, 5)):
        counts = [count_monomials(n, q, s) for s in range(n * (q - 1) + 3)]
        assert counts == sorted(counts)
        assert counts[-1] == q**n


def test_binary_box_bound_equals_clp_threshold() -> None:
    for n in range(1, 9):
        for s in range(0, n + 2):
            assert main_theorem_bound(n, 2, s) == clp_threshold(n, 2 * s), (n, s)


def test_box_bound_at_most_twice_bbs_for_small_s() -> None:
    for n, q in itertools.product(range(1, 7), range(2, 6)):
        for s in range(1, q):
            assert main_theorem_bound(n, q, s) <= 2 * bbs_bound(n, s), (n, q, s)


def test_classical_bounds() -> None:
    assert bbs_bound(2, 1) == 3
    assert bbs_bound(3, 2) == 10
    assert bbs_bound(7, 0) == 1
    assert deza_frankl_bound(3, 2) == 10
    assert dgs_bound(3, 2) == 9
    assert dgs_bound(2, 1) == 3
    assert dgs_bound(4, 1) == 5
    with pytest.raises(ValueError):
        dgs_bound(1, 1)


@pytest.mark.parametrize(("n", "d", "expected"), [(4, 4, 22), (7, 0, 2), (5, 2, 12), (5, 3, 12)])
def test_clp_threshold(n: int, d: int, expected: int) -> None:
    assert clp_threshold(n, d) == expected


def test_box_bounds() -> None:
    assert main_theorem_bound(2, 2, 1) == 6
    assert main_theorem_bound(3, 2, 1) == 8
    assert main_theorem_bound(2, 3, 4) == 2 * 9
    assert dfrank_box_bound(2, 2, 1) == 3
    assert dfrank_box_bound(3, 3, 2) == 10
    assert dfrank_box_bound(5, 3, 0) == 1


def test_corollary_at_boundary_d_is_exact_power() -> None:
    # d = n(q-1)/s = 2 gives J = 1, so the bound is 2 * q^n
    assert corollary_bound(2, 2, 1).contains(8.0)
    assert corollary_bound(3, 3, 3, tol=1e-4).contains(54.0)


def test_corollary_below_trivial_cap_when_minimum_is_interior() -> None:
    bound = corollary_bound(3, 2, 1)   # d = 3, J(2, 3) ~ 0.944941
    expected = 2 * (2 * 0.944941) ** 3
    assert bound.lower <= expected + 1e-4 and expected - 1e-4 <= bound.upper
    assert bound.upper < 2 * 2**3


def test_maincor2_bound() -> None:
    assert maincor2_bound(2, 2, 2).contains(8.0)
    assert maincor2_bound(3, 3, 6, tol=1e-4).contains(54.0)
    strict = maincor2_bound(3, 3, 4, tol=1e-4)    # d = 3
    assert math.isfinite(strict.upper) and strict.upper < 54
    with pytest.raises(ValueError):
        maincor2_bound(2, 2, 0)


def test_bound_table_row_values() -> None:
    reports = {r.name: r for r in bound_table(2, 2, 1)}
    assert reports["main_theorem"].value == 6
    assert reports["dfrank_box"].value == 3
    assert reports["bbs"].value == 3
    assert reports["clp_threshold"].value == clp_threshold(2, 2)
    assert isinstance(reports["corollary"].value, RealInterval)
    assert bound_table(3, 3, 2)[4].value == 10


def test_bound_table_records_errors_per_cell() -> None:
    reports = {r.name: r for r in bound_table(1, 2, 0)}
    assert reports["dgs"].value is None and reports["dgs"].error
    assert reports["corollary"].value is None and reports["corollary"].error
    assert reports["bbs"].value == 1


def test_interval_power_encloses_exact_value() -> None:
    iv = interval.power(interval.enclose(1.1, 1.1), 5)
    assert iv.contains(1.1**5)
    assert iv.width < 1e-12


def test_interval_rejects_negative_inputs() -> None:
    with pytest.raises(ValueError):
        interval.scale(RealInterval(0.0, 1.0), -1.0)
    with pytest.raises(ValueError):
        interval.power(RealInterval(-1.0, 1.0), 2)
