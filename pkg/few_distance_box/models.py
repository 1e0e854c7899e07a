"""Data model dataclasses for few_distance_box.

All coordinates, squared distances and scalar products are exact
`fractions.Fraction` values (always in lowest terms, so equality is structural).
Real-valued quantities derived from J are carried as closed intervals.
"""

from __future__ import annotations

import datetime
import enum
import itertools
import math
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Union

from few_distance_box.config import (
    DEFAULT_NODE_BUDGET,
    DEFAULT_TIME_BUDGET_S,
    DEFAULT_WORKERS,
    PALETTE_ENUMERATION_LIMIT,
)

Scalar = Fraction
Point = tuple[Fraction, ...]
RealLike = Union[Fraction, float, int]


class DimensionMismatchError(ValueError):
    """Two points (or a point and a box/polynomial) disagree on dimension."""


def as_point(coords: Iterable[Any]) -> Point:
    """Coerce an iterable of ints/Fractions/rational strings to a Point."""
    return tuple(Fraction(c) for c in coords)


@dataclass(frozen=True)
class Box:
    """Product of n coordinate sets of equal size q >= 2.

    Coordinate sets are stored sorted; `points()` yields the box in
    lexicographic order, which is the canonical point order everywhere.
    """

    coords: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        axes = tuple(tuple(sorted(Fraction(v) for v in axis)) for axis in self.coords)
        if not axes:
            raise ValueError("Box needs at least one coordinate set (n >= 1)")
        for i, axis in enumerate(axes):
            if len(set(axis)) != len(axis):
                raise ValueError(f"Coordinate set {i} contains duplicates: {axis}")
        sizes = {len(axis) for axis in axes}
        if len(sizes) != 1:
            raise ValueError(f"Coordinate sets must all have the same size, got {sorted(sizes)}")
        if len(axes[0]) < 2:
            raise ValueError("Coordinate sets must have q >= 2 elements")
        object.__setattr__(self, "coords", axes)

    @classmethod
    def grid(cls, n: int, q: int) -> Box:
        """The integer grid box {0, ..., q-1}^n."""
        return cls(tuple(tuple(Fraction(v) for v in range(q)) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def q(self) -> int:
        return len(self.coords[0])

    @property
    def size(self) -> int:
        return self.q**self.n

    def points(self) -> Iterator[Point]:
        return itertools.product(*self.coords)

    def contains(self, point: Point) -> bool:
        if len(point) != self.n:
            return False
        return all(c in axis for c, axis in zip(point, self.coords))

    def is_arithmetic_axis(self, i: int) -> bool:
        """True when coordinate set i is an arithmetic progression."""
        axis = self.coords[i]
        gaps = {b - a for a, b in zip(axis, axis[1:])}
        return len(gaps) == 1


@dataclass(frozen=True)
class PointSet:
    """Duplicate-free points lying in `box`, kept in the order given."""

    box: Box
    points: tuple[Point, ...]

    def __post_init__(self) -> None:
        pts = tuple(as_point(p) for p in self.points)
        seen: set[Point] = set()
        for p in pts:
            if len(p) != self.box.n:
                raise DimensionMismatchError(
                    f"Point {_fmt_point(p)} has dimension {len(p)}, box has n={self.box.n}"
                )
            if not self.box.contains(p):
                raise ValueError(f"Point {_fmt_point(p)} does not lie in the box")
            if p in seen:
                raise ValueError(f"Duplicate point {_fmt_point(p)} in point set")
            seen.add(p)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[Point]:
        return iter(self.points)

    @property
    def n(self) -> int:
        return self.box.n


@dataclass(frozen=True)
class SquaredDistancePalette:
    """Sorted, duplicate-free set of positive squared distances."""

    values: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        vals = tuple(sorted(Fraction(v) for v in self.values))
        if len(set(vals)) != len(vals):
            raise ValueError(f"Palette values must be distinct: {vals}")
        if any(v <= 0 for v in vals):
            raise ValueError("Palette values are squared distances and must be positive")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    def __contains__(self, value: object) -> bool:
        return value in self.values


@dataclass(frozen=True)
class ScalarProductSet:
    """Sorted, duplicate-free set of scalar products s(F)."""

    values: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        vals = tuple(sorted(Fraction(v) for v in self.values))
        if len(set(vals)) != len(vals):
            raise ValueError(f"Scalar products must be distinct: {vals}")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.values)

    def __contains__(self, value: object) -> bool:
        return value in self.values


@dataclass(frozen=True)
class RealInterval:
    """Closed interval [lower, upper] of doubles enclosing a real quantity."""

    lower: float
    upper: float

    def __post_init__(self) -> None:
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise ValueError("Interval endpoints must not be NaN")
        if self.lower > self.upper:
            raise ValueError(f"Invalid interval [{self.lower}, {self.upper}]")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper


@dataclass(frozen=True)
class JParams:
    """Arguments of J(t, d). d may be any positive real, not only an integer."""

    t: int
    d: RealLike

    def __post_init__(self) -> None:
        if self.t < 2:
            raise ValueError(f"J(t, d) needs t >= 2, got t={self.t}")
        if not self.d > 0:
            raise ValueError(f"J(t, d) needs d > 0, got d={self.d}")


@dataclass(frozen=True)
class JValue:
    """Certified enclosure of J(t, d)."""

    lower: float
    upper: float
    argmin_estimate: float
    attained_interior: bool

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError(f"Invalid J enclosure [{self.lower}, {self.upper}]")
        if not 0.0 < self.argmin_estimate <= 1.0:
            raise ValueError(f"argmin estimate {self.argmin_estimate} outside (0, 1]")

    @property
    def value(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def interval(self) -> RealInterval:
        return RealInterval(self.lower, self.upper)


@dataclass(frozen=True)
class BoundReport:
    """One named bound evaluated at `params`.

    `value` is an exact integer for combinatorial bounds and an interval for
    J-based bounds. It is None only when evaluation failed, with `error` set.
    """

    name: str
    params: dict[str, int]
    value: int | RealInterval | None
    error: str | None = None

    def __post_init__(self) -> None:
        if self.value is None and self.error is None:
            raise ValueError(f"Bound {self.name} has neither a value nor an error")
        if isinstance(self.value, int) and self.value < 0:
            raise ValueError(f"Bound {self.name} is negative: {self.value}")
        if isinstance(self.value, RealInterval) and (
            self.value.lower < 0 or math.isinf(self.value.upper)
        ):
            raise ValueError(f"Bound {self.name} interval must be finite and >= 0")


@dataclass(frozen=True)
class WitnessCheckResult:
    """Outcome of checking conditions (i) and (ii) for a witness polynomial.

    The bounds are always filled in; they only bound |F| when both
    conditions hold (`hypotheses_hold`).
    """

    condition_i_ok: bool
    condition_ii_ok: bool
    first_violation: tuple[Point, Point] | None
    bound_maincor: int
    bound_maincor2: RealInterval | None
    degree: int
    n: int
    t: int
    size: int

    def __post_init__(self) -> None:
        if self.first_violation is not None and self.hypotheses_hold:
            raise ValueError("A violation was reported although both conditions hold")

    @property
    def hypotheses_hold(self) -> bool:
        return self.condition_i_ok and self.condition_ii_ok


class ClpStatus(str, enum.Enum):
    CONCLUSION_HOLDS = "conclusion-holds"
    HYPOTHESES_NOT_MET = "hypotheses-not-met"
    COUNTEREXAMPLE = "counterexample"


@dataclass(frozen=True)
class ClpCheckResult:
    status: ClpStatus
    threshold: int
    degree: int
    size: int
    value_at_zero: Fraction
    differences_vanish: bool

    @property
    def holds(self) -> bool:
        """Truth of "hypotheses => P(0) = 0" for this instance."""
        return self.status is not ClpStatus.COUNTEREXAMPLE


class SearchMode(str, enum.Enum):
    EXACT = "exact"
    ANYTIME = "anytime"


class PaletteMode(str, enum.Enum):
    DYNAMIC = "dynamic"
    ENUMERATE = "enumerate-palettes"


@dataclass(frozen=True)
class SearchConfig:
    mode: SearchMode = SearchMode.EXACT
    node_budget: int = DEFAULT_NODE_BUDGET
    time_budget: float = DEFAULT_TIME_BUDGET_S
    symmetry_reduction: bool = True
    palette_mode: PaletteMode = PaletteMode.DYNAMIC
    worker_count: int = DEFAULT_WORKERS
    palette_enumeration_limit: int = PALETTE_ENUMERATION_LIMIT

    def __post_init__(self) -> None:
        if self.node_budget <= 0:
            raise ValueError(f"node_budget must be positive, got {self.node_budget}")
        if self.time_budget <= 0:
            raise ValueError(f"time_budget must be positive, got {self.time_budget}")
        if self.worker_count < 1:
            raise ValueError(f"worker_count must be >= 1, got {self.worker_count}")
        if self.palette_enumeration_limit < 0:
            raise ValueError(
                f"palette_enumeration_limit must be >= 0, got {self.palette_enumeration_limit}"
            )


@dataclass(frozen=True)
class SearchResult:
    """Best s-distance subset found in a box.

    `optimal` is True only for an exact-mode search that ran to completion.
    """

    s: int
    best_size: int
    witness: PointSet
    optimal: bool
    completed: bool
    nodes_explored: int
    palette_of_witness: SquaredDistancePalette
    orbit_count: int

    def __post_init__(self) -> None:
        if len(self.witness) != self.best_size:
            raise ValueError("Witness size differs from best_size")
        if len(self.palette_of_witness) > self.s:
            raise ValueError("Witness is not an s-distance set")


@dataclass(frozen=True)
class ProbeReport:
    """Search maximum next to the conjectured and proved caps."""

    n: int
    q: int
    s: int
    result: SearchResult
    conjectured_cap: int     # monomial count, right side of the conjecture
    theorem_cap: int         # twice the monomial count
    bbs_cap: int
    corollary: RealInterval | None

    @property
    def best_size(self) -> int:
        return self.result.best_size

    @property
    def conjecture_consistent(self) -> bool:
        return self.best_size <= self.conjectured_cap

    @property
    def theorem_consistent(self) -> bool:
        return self.best_size <= self.theorem_cap


@dataclass(frozen=True)
class ConstructionReport:
    name: str
    points: PointSet
    claimed_size: int
    palette: SquaredDistancePalette
    s_achieved: int

    def __post_init__(self) -> None:
        if self.s_achieved != len(self.palette):
            raise ValueError("s_achieved must equal the palette size")

    @property
    def consistent(self) -> bool:
        return len(self.points) == self.claimed_size


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce one output file. No timestamps."""

    subcommand: str
    parameters: dict[str, Any]
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    seed: int | None = None
    version: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "subcommand": self.subcommand,
            "parameters": self.parameters,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "seed": self.seed,
            "version": self.version,
        }


@dataclass
class RunMetrics:
    """Performance and metadata for one CLI invocation."""

    started_at: datetime.datetime
    subcommand: str = ""
    finished_at: datetime.datetime | None = None
    nodes_explored: int = 0
    cells_evaluated: int = 0
    files_written: int = 0
    errors: list[str] = field(default_factory=list)

    @property
    def elapsed_seconds(self) -> float | None:
        if self.finished_at:
            return (self.finished_at - self.started_at).total_seconds()
        return None


def _fmt_point(p: Point) -> str:
    return "(" + ", ".join(str(c) for c in p) + ")"
