"""Rich terminal output for few_distance_box.

Renders bound tables, search and probe results, witness checks and J
enclosures. Everything goes to stderr; data files and stdout carry the
machine-readable output.
"""

from __future__ import annotations

from collections.abc import Sequence

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from few_distance_box.config import AppConfig
from few_distance_box.models import (
    BoundReport,
    ClpCheckResult,
    ClpStatus,
    ConstructionReport,
    JParams,
    JValue,
    ProbeReport,
    RealInterval,
    RunMetrics,
    SearchResult,
    SquaredDistancePalette,
    WitnessCheckResult,
)

console = Console(stderr=True)

_BOUND_ORDER = [
    "bbs",
    "dgs",
    "deza_frankl",
    "main_theorem",
    "dfrank_box",
    "corollary",
    "clp_threshold",
]


def apply_config(config: AppConfig) -> None:
    if config.no_color:
        console.no_color = True


def _fmt_interval(iv: RealInterval | None, digits: int = 6) -> str:
    if iv is None:
        return "—"
    return f"[{iv.lower:.{digits}f}, {iv.upper:.{digits}f}]"


def _fmt_bound(report: BoundReport) -> str:
    if report.value is None:
        return "[dim]n/a[/dim]"
    if isinstance(report.value, RealInterval):
        return _fmt_interval(report.value, 2)
    return f"{report.value:,}"


def _fmt_palette(palette: SquaredDistancePalette) -> str:
    return "{" + ", ".join(str(v) for v in palette) + "}"


def _yes_no(flag: bool) -> str:
    return "[green]yes[/green]" if flag else "[red]no[/red]"


def print_bounds_table(cells: Sequence[tuple[int, int, int, list[BoundReport]]]) -> None:
    """One row per (n, q, s) cell; unavailable bounds show as n/a."""
    if not cells:
        console.print("[yellow]Empty parameter grid: nothing to tabulate.[/yellow]")
        return
    tbl = Table(box=box.SIMPLE_HEAVY, show_header=True, header_style="bold magenta")
    for name in ("n", "q", "s"):
        tbl.add_column(name, justify="right")
    for name in _BOUND_ORDER:
        tbl.add_column(name, justify="right")
    for n, q, s, reports in cells:
        by_name = {r.name: r for r in reports}
        tbl.add_row(
            str(n),
            str(q),
            str(s),
            *(_fmt_bound(by_name[name]) if name in by_name else "—" for name in _BOUND_ORDER),
        )
    console.print(tbl)


def print_search_result(result: SearchResult, theorem_cap: int | None = None) -> None:
    status = "optimal" if result.optimal else ("complete" if result.completed else "budget hit")
    colour = "green" if result.optimal else "yellow"
    lines = [
        f"Best size: [bold]{result.best_size}[/bold]  ([{colour}]{status}[/{colour}])",
        f"Palette of witness: {_fmt_palette(result.palette_of_witness)}",
        f"Nodes explored: {result.nodes_explored:,}  |  Orbits: {result.orbit_count}",
    ]
    if theorem_cap is not None:
        lines.append(f"Theorem cap 2M(n, q, s): {theorem_cap:,}")
    console.print(
        Panel("\n".join(lines), title=f"[bold]s = {result.s} search[/bold]", border_style=colour)
    )
    if len(result.witness) <= 32:
        console.print(
            "[dim]Witness: "
            + " ".join("(" + ",".join(str(c) for c in p) + ")" for p in result.witness)
            + "[/dim]"
        )


def print_probe_report(report: ProbeReport) -> None:
    tbl = Table(box=box.SIMPLE_HEAVY, show_header=True, header_style="bold magenta")
    for name in ("n", "q", "s", "best", "M(n,q,s)", "2M(n,q,s)", "bbs", "corollary", "optimal"):
        tbl.add_column(name, justify="right")
    style = "" if report.theorem_consistent else "bold red"
    tbl.add_row(
        str(report.n),
        str(report.q),
        str(report.s),
        str(report.best_size),
        f"{report.conjectured_cap:,}",
        f"{report.theorem_cap:,}",
        f"{report.bbs_cap:,}",
        _fmt_interval(report.corollary, 2),
        _yes_no(report.result.optimal),
        style=style,
    )
    console.print(tbl)
    if not report.theorem_consistent:
        console.print("[bold red]Search result exceeds the proved cap 2M(n, q, s).[/bold red]")
    elif report.best_size == report.conjectured_cap:
        console.print("[green]Conjectured cap M(n, q, s) is attained.[/green]")
    elif not report.conjecture_consistent:
        console.print("[yellow]Search result exceeds the conjectured cap M(n, q, s).[/yellow]")
    else:
        console.print(
            f"[dim]Slack against the conjecture: {report.conjectured_cap - report.best_size}[/dim]"
        )


def print_witness_check(result: WitnessCheckResult) -> None:
    lines = [
        f"|F| = {result.size}  |  n = {result.n}  |  t = {result.t}  |  deg P = {result.degree}",
        f"(i)  P(a, a) != 0 on F: {_yes_no(result.condition_i_ok)}",
        f"(ii) P(a, b) == 0 off the diagonal: {_yes_no(result.condition_ii_ok)}",
        f"Slice-rank bound: {result.bound_maincor:,}",
        f"J bound: {_fmt_interval(result.bound_maincor2, 3)}",
    ]
    if result.first_violation is not None:
        a, b = result.first_violation
        lines.append(
            "[red]First violation: "
            f"({','.join(map(str, a))}) / ({','.join(map(str, b))})[/red]"
        )
    colour = "green" if result.hypotheses_hold else "red"
    console.print(Panel("\n".join(lines), title="[bold]Witness check[/bold]", border_style=colour))


def print_clp_check(result: ClpCheckResult) -> None:
    colour = {
        ClpStatus.CONCLUSION_HOLDS: "green",
        ClpStatus.HYPOTHESES_NOT_MET: "dim",
        ClpStatus.COUNTEREXAMPLE: "bold red",
    }[result.status]
    console.print(
        f"[{colour}]{result.status.value}[/{colour}]  "
        f"[dim]|F| = {result.size}, threshold = {result.threshold}, "
        f"deg P = {result.degree}, P(0) = {result.value_at_zero}[/dim]"
    )


def print_construction(report: ConstructionReport) -> None:
    colour = "green" if report.consistent else "red"
    console.print(
        f"[bold]{report.name}[/bold]: {len(report.points)} points "
        f"[{colour}](claimed {report.claimed_size:,})[/{colour}]  |  "
        f"palette {_fmt_palette(report.palette)}  |  s = {report.s_achieved}"
    )


def print_j_table(rows: Sequence[tuple[JParams, JValue]]) -> None:
    tbl = Table(box=box.SIMPLE_HEAVY, show_header=True, header_style="bold magenta")
    tbl.add_column("t", justify="right")
    tbl.add_column("d", justify="right")
    tbl.add_column("J enclosure", justify="right")
    tbl.add_column("argmin x", justify="right")
    tbl.add_column("interior", justify="center")
    for params, value in rows:
        tbl.add_row(
            str(params.t),
            str(params.d),
            _fmt_interval(value.interval, 7),
            f"{value.argmin_estimate:.6f}",
            _yes_no(value.attained_interior),
        )
    console.print(tbl)


def print_j_limit(limit: RealInterval) -> None:
    console.print(f"lim J(t, 3) as t -> inf: [bold]{_fmt_interval(limit, 7)}[/bold]")


def print_range_check(results: dict[int, bool]) -> None:
    for t, ok in results.items():
        mark = "[green]in range[/green]" if ok else "[red]out of range[/red]"
        console.print(f"[dim]J({t}, 3)[/dim] {mark}")


def print_progress(message: str) -> None:
    console.print(f"[dim]  {message}[/dim]")


def print_written(path: str) -> None:
    console.print(f"[dim]Wrote {path}[/dim]")


def print_run_summary(metrics: RunMetrics) -> None:
    """Print a compact one-line run summary with elapsed time and error count."""
    console.print(f"\n[dim]{'─' * 62}[/dim]")
    parts = [f"Command: {metrics.subcommand}"]
    if metrics.cells_evaluated:
        parts.append(f"Cells: {metrics.cells_evaluated}")
    if metrics.nodes_explored:
        parts.append(f"Nodes: {metrics.nodes_explored:,}")
    parts.append(f"Files: {metrics.files_written}")
    if metrics.elapsed_seconds is not None:
        parts.append(f"Time: {metrics.elapsed_seconds:.1f}s")
    console.print(f"[dim]{' | '.join(parts)}[/dim]")
    for err in metrics.errors:
        console.print(f"[red]⚠ {err}[/red]")
