"""CLI argument parsing and validation for few_distance_box.

Usage examples:
    python -m few_distance_box bounds --n 2 3 --q 2 3 --s 1 2 --format csv
    python -m few_distance_box search --box box.json --s 2 --workers 4 --out result.json
    python -m few_distance_box probe --n 3 --q 2 --s 1
    python -m few_distance_box witness build --points pts.json --out poly.json
    python -m few_distance_box witness check --poly poly.json --points pts.json
    python -m few_distance_box construct charvec --n 8 --s 3 --out pts.json
    python -m few_distance_box jconst --t 3 4 5 --d 3 --limit
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import NoReturn

from few_distance_box.config import (
    DEFAULT_NODE_BUDGET,
    DEFAULT_TIME_BUDGET_S,
    DEFAULT_TOL,
    DEFAULT_WORKERS,
    EXIT_USAGE,
)
from few_distance_box.models import PaletteMode, SearchMode


@dataclass
class CLIArgs:
    command: str
    action: str | None = None   # witness build|check|clp, construct charvec|box

    # Single parameters (search, probe, construct, witness check)
    n: int | None = None
    q: int | None = None
    s: int | None = None
    t: int | None = None

    # Parameter grids (bounds, jconst)
    n_values: list[int] = field(default_factory=list)
    q_values: list[int] = field(default_factory=list)
    s_values: list[int] = field(default_factory=list)
    t_values: list[int] = field(default_factory=list)
    d: Fraction = Fraction(3)
    limit: bool = False
    range_check: bool = False

    # Inputs
    box_path: Path | None = None
    points_path: Path | None = None
    poly_path: Path | None = None
    palette: list[Fraction] | None = None
    scalar_products: bool = False

    # Search
    mode: SearchMode = SearchMode.EXACT
    palette_mode: PaletteMode = PaletteMode.DYNAMIC
    node_budget: int = DEFAULT_NODE_BUDGET
    time_budget: float = DEFAULT_TIME_BUDGET_S
    symmetry: bool = True
    workers: int = DEFAULT_WORKERS

    # Output
    tol: float = DEFAULT_TOL
    format: str = "json"
    out: Path | None = None
    quiet: bool = False


class _Parser(argparse.ArgumentParser):
    """Exit code 1 on usage errors; 2 means a mathematical inconsistency."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def parse_args(argv: list[str] | None = None) -> CLIArgs:
    parser = _Parser(
        prog="few-distance-box",
        description="Bounds, witnesses and exhaustive search for s-distance sets in boxes",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
examples:
  %(prog)s bounds --n 2 3 --q 2 3 --s 1 2 --format csv   # bound table over a grid
  %(prog)s search --n 3 --q 3 --s 2 --workers 4          # exact search on {0,1,2}^3
  %(prog)s probe --n 3 --q 2 --s 1                       # compare with M(n, q, s)
  %(prog)s witness check --poly p.json --points f.json   # conditions (i) and (ii)
  %(prog)s jconst --t 3 4 5 6 --limit                    # J(t, 3) and its limit
        """,
    )
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)

    bounds = commands.add_parser("bounds", help="Every bound over an (n, q, s) grid")
    bounds.add_argument("--n", type=int, nargs="*", default=[], dest="n_values", metavar="N")
    bounds.add_argument("--q", type=int, nargs="*", default=[], dest="q_values", metavar="Q")
    bounds.add_argument("--s", type=int, nargs="*", default=[], dest="s_values", metavar="S")
    bounds.add_argument(
        "--format", choices=["csv", "json"], default="csv",
        help="Output format (default: csv)",
    )
    _add_common(bounds)

    search = commands.add_parser("search", help="Maximum s-distance subset of a box")
    _add_box_source(search)
    search.add_argument("--s", type=int, required=True, metavar="S")
    _add_search_flags(search)
    _add_common(search)

    probe = commands.add_parser("probe", help="Search result against M(n, q, s) and 2M(n, q, s)")
    probe.add_argument("--n", type=int, required=True, metavar="N")
    probe.add_argument("--q", type=int, required=True, metavar="Q")
    probe.add_argument("--s", type=int, required=True, metavar="S")
    probe.add_argument(
        "--box", type=Path, dest="box_path", metavar="PATH",
        help="Box JSON (default: the integer grid {0, ..., q-1}^n)",
    )
    _add_search_flags(probe)
    _add_common(probe)

    witness = commands.add_parser("witness", help="Build or check witness polynomials")
    witness_actions = witness.add_subparsers(dest="action", metavar="ACTION", required=True)
    build = witness_actions.add_parser("build", help="Distance polynomial for a point set")
    build.add_argument("--points", type=Path, required=True, dest="points_path", metavar="PATH")
    build.add_argument(
        "--palette", type=_rational_list, metavar="D2,D2,...",
        help="Squared distances to use instead of the point set's own palette",
    )
    _add_common(build)
    check = witness_actions.add_parser("check", help="Verify conditions (i) and (ii)")
    check.add_argument("--poly", type=Path, required=True, dest="poly_path", metavar="PATH")
    check.add_argument("--points", type=Path, required=True, dest="points_path", metavar="PATH")
    check.add_argument("--t", type=int, metavar="T", help="Coordinate set size (default: box q)")
    check.add_argument(
        "--scalar-products", action="store_true", dest="scalar_products",
        help="Also test the scalar-product conditions against M(n, q, s); needs --s",
    )
    check.add_argument("--s", type=int, metavar="S")
    check.add_argument("--workers", type=int, default=DEFAULT_WORKERS, metavar="N")
    _add_common(check)
    clp = witness_actions.add_parser("clp", help="Check the multilinear vanishing lemma")
    clp.add_argument("--poly", type=Path, required=True, dest="poly_path", metavar="PATH")
    clp.add_argument("--points", type=Path, required=True, dest="points_path", metavar="PATH")
    _add_common(clp)

    construct = commands.add_parser("construct", help="Lower-bound constructions")
    construct_actions = construct.add_subparsers(dest="action", metavar="ACTION", required=True)
    charvec = construct_actions.add_parser("charvec", help="Indicator vectors of s-subsets")
    charvec.add_argument("--n", type=int, required=True, metavar="N")
    charvec.add_argument("--s", type=int, required=True, metavar="S")
    _add_common(charvec)
    whole = construct_actions.add_parser("box", help="The whole box and its palette")
    _add_box_source(whole)
    _add_common(whole)

    jconst = commands.add_parser("jconst", help="Certified enclosures of J(t, d)")
    jconst.add_argument("--t", type=int, nargs="*", default=[], dest="t_values", metavar="T")
    jconst.add_argument(
        "--d", type=_rational, default=Fraction(3), metavar="D",
        help="Exponent parameter d > 0, rational (default: 3)",
    )
    jconst.add_argument(
        "--limit", action="store_true",
        help="Also enclose the t -> infinity limit of J(t, 3)",
    )
    jconst.add_argument(
        "--range-check", action="store_true", dest="range_check",
        help="Check 0.8414 <= J(t, 3) <= 0.9184 for every t >= 3",
    )
    _add_common(jconst)

    ns = parser.parse_args(argv)
    values = {k: v for k, v in vars(ns).items() if v is not None}
    if "mode" in values:
        values["mode"] = SearchMode(values["mode"])
    if "palette_mode" in values:
        values["palette_mode"] = PaletteMode(values["palette_mode"])
    args = CLIArgs(**values)

    _validate_args(args)
    return args


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--tol", type=float, default=DEFAULT_TOL, metavar="FLOAT",
        help=f"Width of J enclosures (default: {DEFAULT_TOL})",
    )
    sub.add_argument(
        "--out", type=Path, metavar="PATH",
        help="Write the result file here (default: stdout)",
    )
    sub.add_argument("--quiet", action="store_true", help="Suppress progress lines")


def _add_box_source(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--box", type=Path, dest="box_path", metavar="PATH", help="Box JSON")
    sub.add_argument("--n", type=int, metavar="N", help="Grid box dimension (with --q)")
    sub.add_argument("--q", type=int, metavar="Q", help="Grid box side (with --n)")


def _add_search_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--mode", choices=[m.value for m in SearchMode], default=SearchMode.EXACT.value,
        help="exact (prove optimality) or anytime (best within budget)",
    )
    sub.add_argument(
        "--palette-mode", choices=[m.value for m in PaletteMode],
        default=PaletteMode.DYNAMIC.value, dest="palette_mode",
        help="dynamic palette or one clique search per s-subset of the box palette",
    )
    sub.add_argument(
        "--node-budget", type=int, default=DEFAULT_NODE_BUDGET, dest="node_budget",
        metavar="N", help=f"Search nodes before giving up (default: {DEFAULT_NODE_BUDGET:,})",
    )
    sub.add_argument(
        "--time-budget", type=float, default=DEFAULT_TIME_BUDGET_S, dest="time_budget",
        metavar="SECONDS", help=f"Wall-clock budget (default: {DEFAULT_TIME_BUDGET_S:.0f})",
    )
    sub.add_argument(
        "--symmetry", action=argparse.BooleanOptionalAction, default=True,
        help="Restrict first points to box-symmetry orbit representatives (default: True)",
    )
    sub.add_argument(
        "--workers", type=int, default=DEFAULT_WORKERS, metavar="N",
        help="Worker processes; results do not depend on this (default: 1)",
    )


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _rational_list(text: str) -> list[Fraction]:
    return [_rational(part) for part in text.split(",") if part.strip()]


def _fail(message: str) -> NoReturn:
    print(f"Error: {message}", file=sys.stderr)
    sys.exit(EXIT_USAGE)


def _validate_args(args: CLIArgs) -> None:
    if not args.tol > 0:
        _fail("--tol must be positive.")
    if args.workers < 1:
        _fail("--workers must be at least 1.")
    if args.node_budget < 1:
        _fail("--node-budget must be positive.")
    if not args.time_budget > 0:
        _fail("--time-budget must be positive.")

    if args.command in ("search", "construct") and args.action in (None, "box"):
        has_grid = args.n is not None and args.q is not None
        if (args.box_path is None) == (not has_grid):
            _fail(f"{args.command}: give either --box PATH or both --n and --q.")
    if args.command in ("search", "probe") and args.s is not None and args.s < 1:
        _fail("--s must be at least 1.")
    if args.command == "witness" and args.scalar_products and args.s is None:
        _fail("--scalar-products needs --s.")
    if args.command == "jconst":
        if not args.t_values and not args.limit:
            _fail("jconst: give --t values, --limit, or both.")
        if args.d <= 0:
            _fail("--d must be positive.")
        if any(t < 2 for t in args.t_values):
            _fail("--t values must be at least 2.")
