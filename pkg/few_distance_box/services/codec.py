"""JSON encoding of every type exchanged between subcommands.

Rationals travel as strings ("3", "-7/2") so they round-trip exactly; big
integer bounds travel as decimal strings for the same reason. Interval ends
are JSON floats (repr round-trips a double). Encoders emit keys in a fixed
order and sort anything set-like, so equal inputs give byte-identical files.

Decoders accept any object that carries the keys they need, which is what
lets a search result or a construction be fed straight back in as a PointSet.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path
from typing import Any

from few_distance_box.models import (
    BoundReport,
    Box,
    ClpCheckResult,
    ConstructionReport,
    JParams,
    JValue,
    Point,
    PointSet,
    ProbeReport,
    RealInterval,
    SearchResult,
    SquaredDistancePalette,
    WitnessCheckResult,
)
from few_distance_box.services.polynomial import MultiPoly

_RATIONAL = re.compile(r"^-?\d+(/[1-9]\d*)?$")


class CodecError(ValueError):
    """A JSON payload is malformed or missing required keys."""


def parse_rational(text: Any) -> Fraction:
    """Strict parse of "p" or "p/q"; JSON integers are also accepted."""
    if isinstance(text, bool):
        raise CodecError(f"Expected a rational, got {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not _RATIONAL.match(text.strip()):
        raise CodecError(f"Expected a rational string like '3' or '-7/2', got {text!r}")
    return Fraction(text.strip())


def format_rational(value: Fraction) -> str:
    return str(Fraction(value))


def read_json(path: str | Path) -> Any:
    """Load a JSON file; OSError propagates, bad JSON becomes CodecError."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CodecError(f"{path}: invalid JSON ({exc})") from exc


# ---- Box / PointSet / palette ----


def box_to_json(box: Box) -> dict[str, Any]:
    return {"coords": [[format_rational(c) for c in axis] for axis in box.coords]}


def box_from_json(obj: Any) -> Box:
    """Accepts {"coords": ...} or any object with a nested "box"."""
    if isinstance(obj, dict) and "coords" not in obj and "box" in obj:
        obj = obj["box"]
    coords = _require(obj, "coords", list)
    axes = []
    for axis in coords:
        if not isinstance(axis, list):
            raise CodecError(f"Coordinate set must be a list, got {axis!r}")
        axes.append(tuple(parse_rational(c) for c in axis))
    return _build(Box, tuple(axes))


def point_set_to_json(points: PointSet) -> dict[str, Any]:
    return {
        "box": box_to_json(points.box),
        "points": [_point_to_json(p) for p in points.points],
    }


def point_set_from_json(obj: Any) -> PointSet:
    box = box_from_json(_require(obj, "box", dict))
    raw = _require(obj, "points", list)
    points: list[Point] = []
    for p in raw:
        if not isinstance(p, list):
            raise CodecError(f"Point must be a list of rationals, got {p!r}")
        points.append(tuple(parse_rational(c) for c in p))
    return _build(PointSet, box, tuple(points))


def palette_to_json(palette: SquaredDistancePalette) -> list[str]:
    return [format_rational(v) for v in palette]


def palette_from_json(obj: Any) -> SquaredDistancePalette:
    if not isinstance(obj, list):
        raise CodecError(f"Palette must be a list of rationals, got {obj!r}")
    return _build(SquaredDistancePalette, tuple(parse_rational(v) for v in obj))


# ---- Polynomials ----


def poly_to_json(poly: MultiPoly) -> dict[str, Any]:
    return {
        "nvars": poly.nvars,
        "degree": poly.total_degree,
        "terms": [
            {"exps": list(exps), "coef": format_rational(coef)}
            for exps, coef in sorted(poly.terms.items())
        ],
    }


def poly_from_json(obj: Any) -> MultiPoly:
    nvars = _require(obj, "nvars", int)
    terms: dict[tuple[int, ...], Fraction] = {}
    for term in _require(obj, "terms", list):
        exps = _require(term, "exps", list)
        if not all(isinstance(e, int) and not isinstance(e, bool) for e in exps):
            raise CodecError(f"Exponents must be integers, got {exps!r}")
        key = tuple(exps)
        if key in terms:
            raise CodecError(f"Repeated monomial {key}")
        terms[key] = parse_rational(_require(term, "coef", (str, int)))
    return _build(MultiPoly, nvars, terms)


# ---- Results ----


def interval_to_json(iv: RealInterval) -> dict[str, float]:
    return {"lower": iv.lower, "upper": iv.upper}


def bound_report_to_json(report: BoundReport) -> dict[str, Any]:
    out: dict[str, Any] = {"name": report.name, "params": dict(report.params)}
    if isinstance(report.value, RealInterval):
        out["value_lo"] = report.value.lower
        out["value_hi"] = report.value.upper
    elif report.value is not None:
        out["value"] = str(report.value)
    if report.error is not None:
        out["error"] = report.error
    return out


def bound_row(n: int, q: int, s: int, reports: list[BoundReport]) -> dict[str, str]:
    """One CSV row keyed by BOUND_COLUMNS; failed cells are left empty."""
    row = {"n": str(n), "q": str(q), "s": str(s)}
    for report in reports:
        if isinstance(report.value, RealInterval):
            row[f"{report.name}_lo"] = repr(report.value.lower)
            row[f"{report.name}_hi"] = repr(report.value.upper)
        elif report.value is None:
            if report.name == "corollary":
                row["corollary_lo"] = row["corollary_hi"] = ""
            else:
                row[report.name] = ""
        else:
            row[report.name] = str(report.value)
    return row


def search_result_to_json(result: SearchResult) -> dict[str, Any]:
    """The witness is flattened to "box" + "points" so the file is also a PointSet."""
    return {
        "s": result.s,
        "best_size": result.best_size,
        "optimal": result.optimal,
        "completed": result.completed,
        "nodes_explored": result.nodes_explored,
        "orbit_count": result.orbit_count,
        "palette_of_witness": palette_to_json(result.palette_of_witness),
        **point_set_to_json(result.witness),
    }


def probe_report_to_json(report: ProbeReport) -> dict[str, Any]:
    return {
        "n": report.n,
        "q": report.q,
        "s": report.s,
        "best_size": report.best_size,
        "conjectured_cap": str(report.conjectured_cap),
        "theorem_cap": str(report.theorem_cap),
        "bbs_cap": str(report.bbs_cap),
        "corollary": interval_to_json(report.corollary) if report.corollary else None,
        "conjecture_consistent": report.conjecture_consistent,
        "theorem_consistent": report.theorem_consistent,
        "search": search_result_to_json(report.result),
    }


def construction_report_to_json(report: ConstructionReport) -> dict[str, Any]:
    return {
        "name": report.name,
        "claimed_size": str(report.claimed_size),
        "size": len(report.points),
        "s_achieved": report.s_achieved,
        "palette": palette_to_json(report.palette),
        "consistent": report.consistent,
        **point_set_to_json(report.points),
    }


def j_value_to_json(params: JParams, value: JValue) -> dict[str, Any]:
    d = params.d
    return {
        "t": params.t,
        "d": format_rational(d) if isinstance(d, Fraction) else d,
        "lower": value.lower,
        "upper": value.upper,
        "value": value.value,
        "argmin_estimate": value.argmin_estimate,
        "attained_interior": value.attained_interior,
    }


def witness_check_to_json(result: WitnessCheckResult) -> dict[str, Any]:
    violation = (
        [_point_to_json(p) for p in result.first_violation]
        if result.first_violation is not None
        else None
    )
    return {
        "n": result.n,
        "t": result.t,
        "size": result.size,
        "degree": result.degree,
        "condition_i_ok": result.condition_i_ok,
        "condition_ii_ok": result.condition_ii_ok,
        "hypotheses_hold": result.hypotheses_hold,
        "first_violation": violation,
        "bound_maincor": str(result.bound_maincor),
        "bound_maincor2": (
            interval_to_json(result.bound_maincor2) if result.bound_maincor2 else None
        ),
    }


def clp_check_to_json(result: ClpCheckResult) -> dict[str, Any]:
    return {
        "status": result.status.value,
        "holds": result.holds,
        "threshold": str(result.threshold),
        "degree": result.degree,
        "size": result.size,
        "differences_vanish": result.differences_vanish,
        "value_at_zero": format_rational(result.value_at_zero),
    }


# ---------------------------------------------------------------------------
# Private helpers
# ---------------------------------------------------------------------------


def _point_to_json(p: Point) -> list[str]:
    return [format_rational(c) for c in p]


def _require(obj: Any, key: str, kind: type | tuple[type, ...]) -> Any:
    if not isinstance(obj, dict):
        raise CodecError(f"Expected a JSON object with key {key!r}, got {type(obj).__name__}")
    if key not in obj:
        raise CodecError(f"Missing key {key!r}")
    value = obj[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise CodecError(f"Key {key!r} has the wrong type: {value!r}")
    return value


def _build(cls: Any, *args: Any) -> Any:
    """Construct a model, turning its validation errors into CodecError."""
    try:
        return cls(*args)
    except CodecError:
        raise
    except ValueError as exc:
        raise CodecError(f"Invalid {cls.__name__}: {exc}") from exc
