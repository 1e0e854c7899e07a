"""Top-level coordinator for few_distance_box.

Owns RunMetrics for the session, routes each subcommand to its services,
prints the terminal view and writes the result file with its manifest.

Never raises. Bad input and I/O problems return 1; a result that contradicts
a proved bound returns 2.
"""

from __future__ import annotations

import datetime
import enum
import itertools
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path
from typing import Any

from few_distance_box import __version__
from few_distance_box.cli import CLIArgs
from few_distance_box.config import (
    BOUND_COLUMNS,
    EXIT_INCONSISTENT,
    EXIT_OK,
    EXIT_USAGE,
    load_config,
)
from few_distance_box.models import (
    Box,
    ClpStatus,
    JParams,
    RunManifest,
    RunMetrics,
    SearchConfig,
    SquaredDistancePalette,
)
from few_distance_box.output import files, terminal
from few_distance_box.services import (
    bounds,
    codec,
    constructions,
    geometry,
    j_constant,
    polynomial,
    search,
)

# Fields that never change a result and so stay out of the manifest.
_NON_RESULT_FIELDS = {"command", "out", "quiet", "workers", "box_path", "points_path", "poly_path"}


def run(args: CLIArgs) -> int:
    """Main application entry point. Returns 0, 1 (usage / IO) or 2 (inconsistency)."""
    terminal.apply_config(load_config())
    metrics = RunMetrics(started_at=datetime.datetime.now(), subcommand=_label(args))

    handler = _HANDLERS[args.command]
    try:
        code = handler(args, metrics)
    except codec.CodecError as exc:
        terminal.console.print(f"[red]Malformed input: {exc}[/red]")
        metrics.errors.append(str(exc))
        code = EXIT_USAGE
    except (ValueError, OSError, j_constant.EnclosureError) as exc:
        terminal.console.print(f"[red]Error: {exc}[/red]")
        metrics.errors.append(str(exc))
        code = EXIT_USAGE
    except Exception as exc:
        terminal.console.print(f"[red]Unexpected failure: {exc!r}[/red]")
        metrics.errors.append(repr(exc))
        code = EXIT_USAGE

    metrics.finished_at = datetime.datetime.now()
    terminal.print_run_summary(metrics)
    return code


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_bounds(args: CLIArgs, metrics: RunMetrics) -> int:
    cells = []
    for n, q, s in itertools.product(args.n_values, args.q_values, args.s_values):
        cells.append((n, q, s, bounds.bound_table(n, q, s, args.tol)))
        metrics.cells_evaluated += 1
    terminal.print_bounds_table(cells)

    manifest = _manifest(args)
    if args.format == "csv":
        rows = [codec.bound_row(n, q, s, reports) for n, q, s, reports in cells]
        files.write_csv(rows, BOUND_COLUMNS, manifest, args.out)
    else:
        payload = {
            "cells": [
                {
                    "n": n,
                    "q": q,
                    "s": s,
                    "bounds": [codec.bound_report_to_json(r) for r in reports],
                }
                for n, q, s, reports in cells
            ]
        }
        files.write_json(payload, manifest, args.out)
    _note_written(args, metrics)
    return EXIT_OK


def _cmd_search(args: CLIArgs, metrics: RunMetrics) -> int:
    assert args.s is not None
    box = _load_box(args)
    result = search.search_max(box, args.s, _search_config(args), _progress(args))
    metrics.nodes_explored = result.nodes_explored
    cap = bounds.main_theorem_bound(box.n, box.q, args.s)
    terminal.print_search_result(result, theorem_cap=cap)

    files.write_json(codec.search_result_to_json(result), _manifest(args), args.out)
    _note_written(args, metrics)
    if result.best_size > cap:
        terminal.console.print("[bold red]Search result exceeds 2M(n, q, s).[/bold red]")
        return EXIT_INCONSISTENT
    return EXIT_OK


def _cmd_probe(args: CLIArgs, metrics: RunMetrics) -> int:
    assert args.n is not None and args.q is not None and args.s is not None
    box = _read_box(args.box_path) if args.box_path else None
    report = search.conjecture_probe(
        args.n, args.q, args.s, box=box, cfg=_search_config(args), tol=args.tol,
        progress=_progress(args),
    )
    metrics.nodes_explored = report.result.nodes_explored
    terminal.print_probe_report(report)

    files.write_json(codec.probe_report_to_json(report), _manifest(args), args.out)
    _note_written(args, metrics)
    return EXIT_OK if report.theorem_consistent else EXIT_INCONSISTENT


def _cmd_witness(args: CLIArgs, metrics: RunMetrics) -> int:
    assert args.points_path is not None
    points = codec.point_set_from_json(codec.read_json(args.points_path))

    if args.action == "build":
        palette = (
            SquaredDistancePalette(tuple(args.palette))
            if args.palette
            else geometry.distance_palette(points)
        )
        poly = polynomial.build_distance_polynomial(points.n, palette)
        terminal.console.print(
            f"[dim]Built P with {len(poly.terms)} terms, degree {poly.total_degree}, "
            f"over {len(palette)} squared distances[/dim]"
        )
        payload = {"palette": codec.palette_to_json(palette), **codec.poly_to_json(poly)}
        files.write_json(payload, _manifest(args), args.out)
        _note_written(args, metrics)
        return EXIT_OK

    assert args.poly_path is not None
    poly = codec.poly_from_json(codec.read_json(args.poly_path))

    if args.action == "clp":
        clp = polynomial.clp_check(poly, points)
        terminal.print_clp_check(clp)
        files.write_json(codec.clp_check_to_json(clp), _manifest(args), args.out)
        _note_written(args, metrics)
        return EXIT_INCONSISTENT if clp.status is ClpStatus.COUNTEREXAMPLE else EXIT_OK

    t = args.t if args.t is not None else points.box.q
    result = polynomial.verify_witness(poly, points, t, args.tol, args.workers)
    terminal.print_witness_check(result)
    payload: dict[str, Any] = codec.witness_check_to_json(result)
    inconsistent = result.hypotheses_hold and (
        result.size > result.bound_maincor
        or (result.bound_maincor2 is not None and result.size > result.bound_maincor2.upper)
    )

    if args.scalar_products:
        assert args.s is not None
        conditions = geometry.check_df_conditions(points, args.s)
        cap = bounds.dfrank_box_bound(points.n, points.box.q, args.s)
        payload["scalar_products"] = {
            "s": args.s,
            "conditions_hold": conditions,
            "bound": str(cap),
            "within_bound": len(points) <= cap,
        }
        terminal.console.print(
            f"Scalar-product conditions: {'hold' if conditions else 'fail'}  |  "
            f"M(n, q, s) = {cap:,}"
        )
        inconsistent = inconsistent or (conditions and len(points) > cap)

    files.write_json(payload, _manifest(args), args.out)
    _note_written(args, metrics)
    if inconsistent:
        terminal.console.print(
            "[bold red]Point set exceeds a bound whose hypotheses hold.[/bold red]"
        )
        return EXIT_INCONSISTENT
    return EXIT_OK


def _cmd_construct(args: CLIArgs, metrics: RunMetrics) -> int:
    if args.action == "charvec":
        assert args.n is not None and args.s is not None
        report = constructions.characteristic_vector_set(args.n, args.s)
    else:
        report = constructions.full_box_report(_load_box(args))
    terminal.print_construction(report)

    files.write_json(codec.construction_report_to_json(report), _manifest(args), args.out)
    _note_written(args, metrics)
    return EXIT_OK if report.consistent else EXIT_INCONSISTENT


def _cmd_jconst(args: CLIArgs, metrics: RunMetrics) -> int:
    rows = [(JParams(t, args.d), value) for t, value in zip(
        args.t_values, j_constant.j_curve(args.t_values, args.d, args.tol)
    )]
    metrics.cells_evaluated = len(rows)
    if rows:
        terminal.print_j_table(rows)
    payload: dict[str, Any] = {"values": [codec.j_value_to_json(p, v) for p, v in rows]}

    if args.limit:
        limit = j_constant.j_limit_d3(args.tol)
        terminal.print_j_limit(limit)
        payload["limit"] = codec.interval_to_json(limit)

    code = EXIT_OK
    if args.range_check:
        checks = {t: j_constant.j_range_check(t, args.tol) for t in args.t_values if t >= 3}
        terminal.print_range_check(checks)
        payload["range_check"] = {str(t): ok for t, ok in checks.items()}
        if not all(checks.values()):
            code = EXIT_INCONSISTENT

    files.write_json(payload, _manifest(args), args.out)
    _note_written(args, metrics)
    return code


_HANDLERS: dict[str, Callable[[CLIArgs, RunMetrics], int]] = {
    "bounds": _cmd_bounds,
    "search": _cmd_search,
    "probe": _cmd_probe,
    "witness": _cmd_witness,
    "construct": _cmd_construct,
    "jconst": _cmd_jconst,
}


# ---------------------------------------------------------------------------
# Private helpers
# ---------------------------------------------------------------------------


def _label(args: CLIArgs) -> str:
    return f"{args.command} {args.action}" if args.action else args.command


def _load_box(args: CLIArgs) -> Box:
    if args.box_path is not None:
        return _read_box(args.box_path)
    assert args.n is not None and args.q is not None
    return Box.grid(args.n, args.q)


def _read_box(path: Path) -> Box:
    return codec.box_from_json(codec.read_json(path))


def _search_config(args: CLIArgs) -> SearchConfig:
    return SearchConfig(
        mode=args.mode,
        node_budget=args.node_budget,
        time_budget=args.time_budget,
        symmetry_reduction=args.symmetry,
        palette_mode=args.palette_mode,
        worker_count=args.workers,
    )


def _progress(args: CLIArgs) -> search.ProgressCallback | None:
    return None if args.quiet else terminal.print_progress


def _manifest(args: CLIArgs) -> RunManifest:
    """Parameters that determine the output, in CLIArgs field order."""
    parameters: dict[str, Any] = {}
    for key, value in vars(args).items():
        if key in _NON_RESULT_FIELDS or value is None or value == []:
            continue
        parameters[key] = _plain(value)
    inputs = [str(p) for p in (args.box_path, args.points_path, args.poly_path) if p is not None]
    outputs = [str(args.out)] if args.out is not None else []
    return RunManifest(
        subcommand=_label(args),
        parameters=parameters,
        inputs=inputs,
        outputs=outputs,
        seed=None,
        version=__version__,
    )


def _plain(value: Any) -> Any:
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, list):
        return [_plain(v) for v in value]
    if isinstance(value, enum.Enum):
        return value.value
    return value


def _note_written(args: CLIArgs, metrics: RunMetrics) -> None:
    if args.out is not None:
        metrics.files_written += 1
        terminal.print_written(str(args.out))
