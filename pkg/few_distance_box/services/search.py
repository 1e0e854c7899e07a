"""Exact and anytime search for maximum s-distance subsets of a box.

Points are indexed in lexicographic order. A subtree is "all sets whose
smallest point is `root`"; subtrees are explored by an iterative
include-first DFS, so within a subtree the first set of a given size that is
found is the lexicographically least one. Subtrees run in fixed-size waves;
every subtree of a wave starts from the same floor, and outcomes are reduced
in root order as if the wave had run sequentially on one node budget. The
result (witness and node count included) therefore does not depend on the
number of workers.

Dynamic mode grows the palette during the DFS. When the box palette has few
s-subsets it searches them one by one instead (a maximum clique per palette),
which prunes far better; both routes return the lexicographically least
maximum.

Symmetry reduction keeps only orbit representatives as roots, and removes the
orbits of earlier representatives from later candidate lists. Any set can be
moved by a box isometry so that it contains the representative of the first
orbit it meets, and the lexicographically least optimum already has that
form, so the reported witness is the same with or without the reduction.
"""

from __future__ import annotations

import concurrent.futures
import contextlib
import dataclasses
import itertools
import math
import time
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Protocol

import numpy as np

from few_distance_box.config import (
    BUDGET_CHECK_EVERY,
    DEFAULT_TOL,
    EXACT_MODE_MAX_POINTS,
    SUBTREE_WAVE_SIZE,
)
from few_distance_box.models import (
    Box,
    PaletteMode,
    Point,
    PointSet,
    ProbeReport,
    SearchConfig,
    SearchMode,
    SearchResult,
    SquaredDistancePalette,
)
from few_distance_box.services.bounds import (
    bbs_bound,
    corollary_bound,
    count_monomials,
    main_theorem_bound,
)
from few_distance_box.services.geometry import distance_palette, squared_distance

IdTable = tuple[tuple[int, ...], ...]


class ProgressCallback(Protocol):
    """Protocol for progress reporting."""

    def __call__(self, message: str) -> None: ...


@dataclass(frozen=True)
class BoxDistances:
    """All pairwise squared distances of a box, as ids into `palette`.

    ids[i][j] is the palette index of the squared distance between points
    i and j (-1 on the diagonal).
    """

    box: Box
    points: tuple[Point, ...]
    palette: SquaredDistancePalette
    ids: IdTable


def box_distances(box: Box) -> BoxDistances:
    """Scale the box to integer coordinates and tabulate distance ids with numpy."""
    if box.size > EXACT_MODE_MAX_POINTS:
        raise ValueError(
            f"Box has {box.size} points; exact search supports at most "
            f"{EXACT_MODE_MAX_POINTS} (anytime mode falls back to a greedy scan)"
        )
    points = tuple(box.points())
    scale = math.lcm(*(c.denominator for axis in box.coords for c in axis))
    scaled = [[int(c * scale) for c in p] for p in points]
    peak = max(abs(v) for row in scaled for v in row)
    # int64 is safe while n * (2 * peak)^2 fits; otherwise use Python ints
    dtype: type = np.int64 if box.n * (2 * peak + 1) ** 2 < 2**62 else object
    coords = np.array(scaled, dtype=dtype)
    diffs = coords[:, None, :] - coords[None, :, :]
    squared = (diffs * diffs).sum(axis=2)
    values, inverse = np.unique(squared, return_inverse=True)
    inverse = inverse.reshape(squared.shape)
    # values[0] is the diagonal 0; shift so real distances are 0-based ids
    ids = tuple(tuple(int(v) - 1 for v in row) for row in inverse)
    palette = SquaredDistancePalette(
        tuple(Fraction(int(v), scale * scale) for v in values[1:])
    )
    return BoxDistances(box=box, points=points, palette=palette, ids=ids)


def global_palette(box: Box) -> SquaredDistancePalette:
    """Every squared distance realised by two distinct points of the box.

    Computed as the sumset of the per-coordinate squared differences, minus 0.
    """
    sums = {Fraction(0)}
    for axis in box.coords:
        squares = {(a - b) ** 2 for a in axis for b in axis}
        sums = {x + y for x in sums for y in squares}
    sums.discard(Fraction(0))
    return SquaredDistancePalette(tuple(sums))


def box_orbits(box: Box) -> list[list[int]]:
    """Orbits of point indices under the box isometries that are safe to use.

    Generators: swapping two coordinates whose coordinate sets are equal, and
    reflecting a coordinate whose set is an arithmetic progression. Each orbit
    is sorted; orbits are ordered by their smallest index.
    """
    n, q = box.n, box.q
    parent = list(range(box.size))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    swaps = [
        (i, j)
        for i, j in itertools.combinations(range(n), 2)
        if box.coords[i] == box.coords[j]
    ]
    reflections = [i for i in range(n) if box.is_arithmetic_axis(i)]
    for index, digits in enumerate(itertools.product(range(q), repeat=n)):
        images: list[tuple[int, ...]] = []
        for i, j in swaps:
            swapped = list(digits)
            swapped[i], swapped[j] = swapped[j], swapped[i]
            images.append(tuple(swapped))
        for i in reflections:
            reflected = list(digits)
            reflected[i] = q - 1 - reflected[i]
            images.append(tuple(reflected))
        for image in images:
            a, b = find(index), find(_digits_to_index(image, q))
            if a != b:
                parent[max(a, b)] = min(a, b)

    groups: dict[int, list[int]] = {}
    for index in range(box.size):
        groups.setdefault(find(index), []).append(index)
    return sorted(groups.values(), key=lambda orbit: orbit[0])


def greedy_s_distance_set(box: Box, s: int) -> PointSet:
    """Scan the box in lexicographic order, keeping each point that leaves |palette| <= s.

    Works on boxes of any size: distances are computed on the fly.
    """
    chosen, _, _ = _greedy_points(box, s, budget=box.size, deadline=math.inf)
    return PointSet(box, chosen)


def search_max(
    box: Box,
    s: int,
    cfg: SearchConfig | None = None,
    progress: ProgressCallback | None = None,
) -> SearchResult:
    """Largest subset of `box` with at most s distinct distances.

    Exact mode returns the true maximum (optimal=True) when the search
    completes within budget; otherwise the best set found, with optimal=False.
    Among maxima the lexicographically least witness is returned. Anytime mode
    on a box too large to tabulate returns the greedy scan.
    """
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    cfg = cfg or SearchConfig()
    if cfg.mode is SearchMode.ANYTIME and box.size > EXACT_MODE_MAX_POINTS:
        return _greedy_result(box, s, cfg)

    table = box_distances(box)
    orbits = _orbits_for(box, cfg)

    if len(table.palette) <= s:
        # every subset qualifies: the whole box is the unique maximum
        everything = tuple(range(box.size))
        return _result(table, s, everything, cfg, completed=True, nodes=1, orbits=orbits)

    by_palettes = cfg.palette_mode is PaletteMode.ENUMERATE or (
        math.comb(len(table.palette), s) <= cfg.palette_enumeration_limit
    )
    with _worker_pool(table.ids, cfg.worker_count) as pool:
        if by_palettes:
            return _search_by_palettes(table, s, cfg, orbits, pool, progress)

        context = _Context(s=s, ids=table.ids, allowed=None)
        seed = _greedy_dynamic(table.ids, s)
        deadline = time.monotonic() + cfg.time_budget
        best, nodes, completed = _run_waves(
            context, seed, orbits, cfg.node_budget, deadline, pool, progress
        )
    return _result(table, s, best, cfg, completed=completed, nodes=nodes, orbits=orbits)


def max_clique_for_palette(
    box: Box,
    palette: SquaredDistancePalette,
    cfg: SearchConfig | None = None,
    progress: ProgressCallback | None = None,
) -> SearchResult:
    """Largest subset whose pairwise squared distances all lie in `palette`.

    Branch and bound for maximum clique in the graph joining points at palette
    distances, pruned with a greedy colouring bound.
    """
    cfg = cfg or SearchConfig()
    table = box_distances(box)
    missing = [v for v in palette if v not in table.palette]
    if missing:
        raise ValueError(f"Palette values {missing} are not distances of the box")
    allowed = frozenset(table.palette.values.index(v) for v in palette)
    orbits = _orbits_for(box, cfg)
    context = _Context(s=len(allowed), ids=table.ids, allowed=allowed)
    deadline = time.monotonic() + cfg.time_budget
    with _worker_pool(table.ids, cfg.worker_count) as pool:
        best, nodes, completed = _run_waves(
            context, _greedy_clique(table.ids, allowed), orbits, cfg.node_budget, deadline,
            pool, progress,
        )
    return _result(
        table, len(palette), best, cfg, completed=completed, nodes=nodes, orbits=orbits
    )


def conjecture_probe(
    n: int,
    q: int,
    s: int,
    box: Box | None = None,
    cfg: SearchConfig | None = None,
    tol: float = DEFAULT_TOL,
    progress: ProgressCallback | None = None,
) -> ProbeReport:
    """Compare the search maximum with M(n, q, s) and 2 * M(n, q, s).

    Defaults to the integer grid {0, ..., q-1}^n.
    """
    box = box or Box.grid(n, q)
    if box.n != n or box.q != q:
        raise ValueError(f"Box has n={box.n}, q={box.q}; probe asked for n={n}, q={q}")
    result = search_max(box, s, cfg, progress)
    return ProbeReport(
        n=n,
        q=q,
        s=s,
        result=result,
        conjectured_cap=count_monomials(n, q, s),
        theorem_cap=main_theorem_bound(n, q, s),
        bbs_cap=bbs_bound(n, s),
        corollary=corollary_bound(n, q, s, tol),
    )


# ---------------------------------------------------------------------------
# Branch and bound
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Context:
    s: int
    ids: IdTable
    allowed: frozenset[int] | None   # fixed palette ids (clique mode) or None (dynamic)


@dataclass(frozen=True)
class _Task:
    root: int
    candidates: tuple[int, ...]
    floor: int
    node_budget: int
    deadline: float
    s: int
    allowed: frozenset[int] | None


@dataclass(frozen=True)
class _Outcome:
    root: int
    best: tuple[int, ...] | None
    nodes: int
    completed: bool


@dataclass
class _Frame:
    palette: frozenset[int]
    candidates: list[int]
    pos: int = 0
    bounded: bool = False


def _explore(ctx: _Context, task: _Task) -> _Outcome:
    """Include-first DFS over sets whose smallest point is task.root.

    Records a set only when it beats the running best, which starts at task.floor.
    Never counts more than task.node_budget nodes.
    """
    chosen = [task.root]
    best = task.floor
    best_set: tuple[int, ...] | None = None
    if best < 1:
        best, best_set = 1, (task.root,)
    nodes = 1
    root_palette = ctx.allowed if ctx.allowed is not None else frozenset()
    stack = [_Frame(root_palette, list(task.candidates))]

    while stack:
        frame = stack[-1]
        depth = len(chosen)
        if not frame.bounded:
            frame.bounded = True
            if depth + _upper_bound(ctx, frame, depth, best) <= best:
                stack.pop()
                chosen.pop()
                continue
        remaining = len(frame.candidates) - frame.pos
        if remaining == 0 or depth + remaining <= best:
            stack.pop()
            chosen.pop()
            continue

        if nodes >= task.node_budget or (
            nodes % BUDGET_CHECK_EVERY == 0 and time.monotonic() > task.deadline
        ):
            return _Outcome(task.root, best_set, nodes, completed=False)
        v = frame.candidates[frame.pos]
        frame.pos += 1
        palette, candidates = _extend(ctx, chosen, frame, v)
        nodes += 1
        chosen.append(v)
        if len(chosen) > best:
            best, best_set = len(chosen), tuple(chosen)
        stack.append(_Frame(palette, candidates))
    return _Outcome(task.root, best_set, nodes, completed=True)


def _extend(
    ctx: _Context, chosen: list[int], frame: _Frame, v: int
) -> tuple[frozenset[int], list[int]]:
    """Palette and filtered candidates after adding v to `chosen`."""
    ids = ctx.ids
    row = ids[v]
    rest = frame.candidates[frame.pos:]
    if ctx.allowed is not None:
        allowed = ctx.allowed
        return allowed, [c for c in rest if row[c] in allowed]

    palette = frame.palette | {row[u] for u in chosen}
    members = [*chosen, v]
    room = ctx.s - len(palette)
    kept: list[int] = []
    for c in rest:
        crow = ids[c]
        extra = {crow[u] for u in members} - palette
        if len(extra) <= room:
            kept.append(c)
    return palette, kept


def _upper_bound(ctx: _Context, frame: _Frame, depth: int, best: int) -> int:
    """How many more points the frame's candidates could contribute."""
    candidates = frame.candidates
    if depth + len(candidates) <= best:
        return len(candidates)
    # pairwise compatibility is only a fixed graph once the palette is full
    if ctx.allowed is None and len(frame.palette) < ctx.s:
        return len(candidates)
    return _colour_bound(ctx.ids, candidates, frame.palette)


def _colour_bound(ids: IdTable, candidates: Sequence[int], palette: frozenset[int]) -> int:
    """Greedy colouring of the compatibility graph; a clique uses one vertex per colour."""
    classes: list[list[int]] = []
    for v in candidates:
        row = ids[v]
        for members in classes:
            if all(row[u] not in palette for u in members):
                members.append(v)
                break
        else:
            classes.append([v])
    return len(classes)


# ---------------------------------------------------------------------------
# Waves and workers
# ---------------------------------------------------------------------------

_WORKER_IDS: IdTable | None = None


def _init_worker(ids: IdTable) -> None:
    global _WORKER_IDS
    _WORKER_IDS = ids


def _explore_in_worker(task: _Task) -> _Outcome:
    if _WORKER_IDS is None:
        raise RuntimeError("Search worker was not initialised")
    return _explore(_Context(s=task.s, ids=_WORKER_IDS, allowed=task.allowed), task)


@contextlib.contextmanager
def _worker_pool(
    ids: IdTable, workers: int
) -> Iterator[concurrent.futures.ProcessPoolExecutor | None]:
    """One process pool per search; the distance table is shipped once per worker."""
    if workers <= 1:
        yield None
        return
    with concurrent.futures.ProcessPoolExecutor(
        max_workers=workers, initializer=_init_worker, initargs=(ids,)
    ) as pool:
        yield pool


def _run_waves(
    ctx: _Context,
    seed: tuple[int, ...],
    orbits: list[list[int]],
    node_budget: int,
    deadline: float,
    pool: concurrent.futures.ProcessPoolExecutor | None,
    progress: ProgressCallback | None,
    floor: int = -1,
) -> tuple[tuple[int, ...], int, bool]:
    """Run every subtree in waves; returns (best indices, nodes, completed).

    Subtrees only report sets larger than the floor, which starts at
    max(len(seed) - 1, floor). Each later wave starts from the best size found
    in earlier waves, and within a wave the earliest root wins ties. When no
    subtree reports a set, the seed is returned.
    """
    roots = _subtree_roots(ctx, orbits)
    floor = max(floor, len(seed) - 1)
    found: tuple[int, ...] | None = None
    nodes = 0
    completed = True

    for wave_start in range(0, len(roots), SUBTREE_WAVE_SIZE):
        remaining = node_budget - nodes
        if remaining <= 0 or time.monotonic() > deadline:
            completed = False
            break
        batch = [
            (root, candidates)
            for root, candidates in roots[wave_start:wave_start + SUBTREE_WAVE_SIZE]
            if 1 + len(candidates) > floor
        ]
        tasks = [
            _Task(root, candidates, floor, remaining, deadline, ctx.s, ctx.allowed)
            for root, candidates in batch
        ]
        outcomes, finished = _run_wave(ctx, tasks, remaining, pool)

        for outcome in outcomes:
            nodes += outcome.nodes
            if outcome.best is not None and (found is None or len(outcome.best) > len(found)):
                found = outcome.best
        completed = completed and finished
        if found is not None:
            floor = max(floor, len(found))
        if progress:
            done = min(wave_start + SUBTREE_WAVE_SIZE, len(roots))
            best_so_far = max(floor, len(seed))
            progress(f"{done}/{len(roots)} subtrees, best {best_so_far}, {nodes} nodes")
        if not completed:
            break

    return (found if found is not None else seed), nodes, completed


def _run_wave(
    ctx: _Context,
    tasks: list[_Task],
    budget: int,
    pool: concurrent.futures.ProcessPoolExecutor | None,
) -> tuple[list[_Outcome], bool]:
    """Outcomes as if the tasks ran one after another on a shared node budget.

    Workers run every task with the whole budget. In root order, a task whose
    node count fits in what its predecessors left is kept unchanged (a smaller
    budget would have produced the same trace); the first one that does not
    fit is replayed with exactly the remainder, and later tasks are dropped.
    """
    parallel = list(pool.map(_explore_in_worker, tasks)) if pool is not None else None
    outcomes: list[_Outcome] = []
    used = 0
    for index, task in enumerate(tasks):
        left = budget - used
        if left <= 0:
            return outcomes, False
        if parallel is not None and parallel[index].nodes <= left:
            outcome = parallel[index]
        else:
            outcome = _explore(ctx, dataclasses.replace(task, node_budget=left))
        outcomes.append(outcome)
        used += outcome.nodes
        if not outcome.completed:
            return outcomes, False
    return outcomes, True


def _subtree_roots(
    ctx: _Context, orbits: list[list[int]]
) -> list[tuple[int, tuple[int, ...]]]:
    """(root, candidates) per orbit representative; earlier orbits are excluded."""
    size = len(ctx.ids)
    excluded: set[int] = set()
    roots: list[tuple[int, tuple[int, ...]]] = []
    for orbit in orbits:
        root = orbit[0]
        row = ctx.ids[root]
        candidates = tuple(
            c
            for c in range(root + 1, size)
            if c not in excluded and (ctx.allowed is None or row[c] in ctx.allowed)
        )
        roots.append((root, candidates))
        excluded.update(orbit)
    return roots


def _search_by_palettes(
    table: BoxDistances,
    s: int,
    cfg: SearchConfig,
    orbits: list[list[int]],
    pool: concurrent.futures.ProcessPoolExecutor | None,
    progress: ProgressCallback | None,
) -> SearchResult:
    """Maximum clique for every s-subset of the box palette, in lexicographic order.

    The best set so far is the floor for every later palette, so a palette only
    reports sets that at least tie it; ties go to the lexicographically smaller set.
    """
    deadline = time.monotonic() + cfg.time_budget
    best = _greedy_dynamic(table.ids, s)
    nodes = 0
    completed = True
    for combo in itertools.combinations(range(len(table.palette)), s):
        remaining = cfg.node_budget - nodes
        if remaining <= 0 or time.monotonic() > deadline:
            completed = False
            break
        allowed = frozenset(combo)
        context = _Context(s=s, ids=table.ids, allowed=allowed)
        found, used, done = _run_waves(
            context, _greedy_clique(table.ids, allowed), orbits, remaining, deadline, pool,
            None, floor=len(best) - 1,
        )
        nodes += used
        completed = completed and done
        if len(found) > len(best) or (len(found) == len(best) and found < best):
            best = found
            if progress:
                progress(f"palette {combo}: best {len(best)}, {nodes} nodes")
        if not done:
            break
    return _result(table, s, best, cfg, completed=completed, nodes=nodes, orbits=orbits)


# ---------------------------------------------------------------------------
# Private helpers
# ---------------------------------------------------------------------------


def _greedy_dynamic(ids: IdTable, s: int) -> tuple[int, ...]:
    chosen: list[int] = []
    palette: set[int] = set()
    for v in range(len(ids)):
        extra = {ids[v][u] for u in chosen} - palette
        if len(palette) + len(extra) <= s:
            chosen.append(v)
            palette |= extra
    return tuple(chosen)


def _greedy_clique(ids: IdTable, allowed: frozenset[int]) -> tuple[int, ...]:
    chosen: list[int] = []
    for v in range(len(ids)):
        if all(ids[v][u] in allowed for u in chosen):
            chosen.append(v)
    return tuple(chosen)


def _greedy_points(
    box: Box, s: int, budget: int, deadline: float
) -> tuple[tuple[Point, ...], int, bool]:
    """Greedy scan with exact distances; returns (points, points scanned, scanned all)."""
    chosen: list[Point] = []
    palette: set[Fraction] = set()
    scanned = 0
    for point in box.points():
        if scanned >= budget or (
            scanned % BUDGET_CHECK_EVERY == 0 and time.monotonic() > deadline
        ):
            return tuple(chosen), scanned, False
        scanned += 1
        extra = {squared_distance(point, other) for other in chosen} - palette
        if len(palette) + len(extra) <= s:
            chosen.append(point)
            palette |= extra
    return tuple(chosen), scanned, True


def _greedy_result(box: Box, s: int, cfg: SearchConfig) -> SearchResult:
    deadline = time.monotonic() + cfg.time_budget
    chosen, scanned, _ = _greedy_points(box, s, cfg.node_budget, deadline)
    witness = PointSet(box, chosen)
    return SearchResult(
        s=s,
        best_size=len(chosen),
        witness=witness,
        optimal=False,
        # only the whole box is known to be maximal without a search
        completed=len(chosen) == box.size,
        nodes_explored=scanned,
        palette_of_witness=distance_palette(witness),
        orbit_count=0,
    )


def _orbits_for(box: Box, cfg: SearchConfig) -> list[list[int]]:
    if cfg.symmetry_reduction:
        return box_orbits(box)
    return [[i] for i in range(box.size)]


def _digits_to_index(digits: Sequence[int], q: int) -> int:
    index = 0
    for d in digits:
        index = index * q + d
    return index


def _result(
    table: BoxDistances,
    s: int,
    best: tuple[int, ...],
    cfg: SearchConfig,
    completed: bool,
    nodes: int,
    orbits: list[list[int]],
) -> SearchResult:
    witness = PointSet(table.box, tuple(table.points[i] for i in best))
    palette = distance_palette(witness)
    return SearchResult(
        s=s,
        best_size=len(best),
        witness=witness,
        optimal=cfg.mode is SearchMode.EXACT and completed,
        completed=completed,
        nodes_explored=nodes,
        palette_of_witness=palette,
        orbit_count=len(orbits),
    )
