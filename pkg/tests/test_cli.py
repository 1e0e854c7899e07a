"""CLI parsing and end-to-end runs through the orchestrator."""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import pytest

from few_distance_box.cli import parse_args
from few_distance_box.config import BOUND_COLUMNS, CSV_MANIFEST_PREFIX, AppConfig, load_config
from few_distance_box.models import Box, PaletteMode, SearchMode
from few_distance_box.orchestrator import run
from few_distance_box.services import codec
from tests.conftest import make_points


def _run(argv: list[str]) -> int:
    return run(parse_args(argv))


def _write(path: Path, payload: object) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


# ---- Parsing ----


def test_parse_search_flags() -> None:
    args = parse_args(
        ["search", "--n", "2", "--q", "3", "--s", "2", "--mode", "anytime",
         "--palette-mode", "enumerate-palettes", "--no-symmetry", "--workers", "2"]
    )
    assert args.command == "search"
    assert (args.n, args.q, args.s) == (2, 3, 2)
    assert args.mode is SearchMode.ANYTIME
    assert args.palette_mode is PaletteMode.ENUMERATE
    assert args.symmetry is False
    assert args.workers == 2


def test_parse_jconst_rational_d() -> None:
    args = parse_args(["jconst", "--t", "3", "4", "--d", "7/2"])
    assert args.t_values == [3, 4]
    assert args.d == Fraction(7, 2)


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["search", "--s", "1"],                                   # no box source
        ["search", "--n", "2", "--q", "2", "--s", "0"],
        ["search", "--n", "2", "--q", "2", "--s", "1", "--workers", "0"],
        ["jconst"],
        ["jconst", "--t", "1"],
        ["bounds", "--tol", "-1"],
        ["witness"],
        ["construct", "charvec", "--n", "3"],
    ],
)
def test_usage_errors_exit_1(argv: list[str]) -> None:
    with pytest.raises(SystemExit) as excinfo:
        parse_args(argv)
    assert excinfo.value.code == 1


# ---- bounds ----


def test_bounds_csv_rows(tmp_path: Path) -> None:
    out = tmp_path / "bounds.csv"
    argv = ["bounds", "--n", "2", "3", "--q", "2", "3", "--s", "1", "2", "--out", str(out)]
    assert _run(argv) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith(CSV_MANIFEST_PREFIX)
    assert lines[1] == ",".join(BOUND_COLUMNS)
    rows = [dict(zip(BOUND_COLUMNS, line.split(","))) for line in lines[2:]]
    assert len(rows) == 8
    first = next(r for r in rows if (r["n"], r["q"], r["s"]) == ("2", "2", "1"))
    assert (first["main_theorem"], first["dfrank_box"], first["bbs"]) == ("6", "3", "3")
    cell = next(r for r in rows if (r["n"], r["q"], r["s"]) == ("3", "3", "2"))
    assert cell["dfrank_box"] == "10"


def test_bounds_empty_grid_is_header_only(capsys: pytest.CaptureFixture[str]) -> None:
    assert _run(["bounds"]) == 0
    assert capsys.readouterr().out == ",".join(BOUND_COLUMNS) + "\n"


def test_bounds_invalid_cell_is_not_fatal(tmp_path: Path) -> None:
    out = tmp_path / "bounds.json"
    assert _run(["bounds", "--n", "1", "--q", "2", "--s", "0", "--format", "json",
                 "--out", str(out)]) == 0
    document = json.loads(out.read_text(encoding="utf-8"))
    dgs = next(b for b in document["cells"][0]["bounds"] if b["name"] == "dgs")
    assert "error" in dgs and "value" not in dgs


# ---- search / probe ----


def test_search_writes_consumable_result(tmp_path: Path) -> None:
    out = tmp_path / "result.json"
    box = _write(tmp_path / "box.json", codec.box_to_json(Box.grid(3, 2)))
    assert _run(["search", "--box", str(box), "--s", "1", "--out", str(out), "--quiet"]) == 0
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["manifest"]["subcommand"] == "search"
    assert document["manifest"]["inputs"] == [str(box)]
    assert document["best_size"] == 4
    assert document["optimal"] is True
    assert len(codec.point_set_from_json(document)) == 4


def test_search_with_malformed_box_exits_1(tmp_path: Path) -> None:
    box = tmp_path / "box.json"
    box.write_text("{not json", encoding="utf-8")
    assert _run(["search", "--box", str(box), "--s", "1"]) == 1
    _write(box, {"coords": [["0", "x"]]})
    assert _run(["search", "--box", str(box), "--s", "1"]) == 1


def test_search_missing_file_exits_1(tmp_path: Path) -> None:
    assert _run(["search", "--box", str(tmp_path / "absent.json"), "--s", "1"]) == 1


def test_probe_tight_case(tmp_path: Path) -> None:
    out = tmp_path / "probe.json"
    assert _run(["probe", "--n", "3", "--q", "2", "--s", "1", "--out", str(out)]) == 0
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["best_size"] == 4
    assert document["conjectured_cap"] == "4"
    assert document["theorem_consistent"] is True


def test_outputs_are_byte_identical_across_runs_and_workers(tmp_path: Path) -> None:
    out = tmp_path / "result.json"
    argv = ["search", "--n", "2", "--q", "4", "--s", "2", "--out", str(out), "--quiet"]
    assert _run(argv + ["--workers", "1"]) == 0
    first = out.read_bytes()
    assert _run(argv + ["--workers", "3"]) == 0
    assert out.read_bytes() == first


# ---- witness ----


def test_witness_build_then_check(tmp_path: Path) -> None:
    square = Box.grid(2, 2)
    points = _write(
        tmp_path / "pts.json",
        codec.point_set_to_json(make_points(square, (0, 0), (1, 1))),
    )
    poly = tmp_path / "poly.json"
    assert _run(["witness", "build", "--points", str(points), "--out", str(poly)]) == 0
    assert json.loads(poly.read_text(encoding="utf-8"))["degree"] == 2

    report = tmp_path / "check.json"
    assert _run(["witness", "check", "--poly", str(poly), "--points", str(points),
                 "--out", str(report)]) == 0
    document = json.loads(report.read_text(encoding="utf-8"))
    assert document["hypotheses_hold"] is True
    assert document["bound_maincor"] == "6"


def test_witness_check_with_tampered_palette(tmp_path: Path) -> None:
    square = Box.grid(2, 2)
    points = _write(
        tmp_path / "pts.json",
        codec.point_set_to_json(make_points(square, (0, 0), (0, 1), (1, 1))),
    )
    poly = tmp_path / "poly.json"
    assert _run(["witness", "build", "--points", str(points), "--palette", "2",
                 "--out", str(poly)]) == 0
    report = tmp_path / "check.json"
    assert _run(["witness", "check", "--poly", str(poly), "--points", str(points),
                 "--out", str(report)]) == 0
    document = json.loads(report.read_text(encoding="utf-8"))
    assert document["condition_ii_ok"] is False
    assert document["first_violation"] is not None


def test_witness_check_scalar_products(tmp_path: Path) -> None:
    cube = Box.grid(3, 2)
    basis = make_points(cube, (1, 0, 0), (0, 1, 0), (0, 0, 1))
    points = _write(tmp_path / "pts.json", codec.point_set_to_json(basis))
    poly = tmp_path / "poly.json"
    assert _run(["witness", "build", "--points", str(points), "--out", str(poly)]) == 0
    report = tmp_path / "check.json"
    assert _run(["witness", "check", "--poly", str(poly), "--points", str(points),
                 "--scalar-products", "--s", "1", "--out", str(report)]) == 0
    products = json.loads(report.read_text(encoding="utf-8"))["scalar_products"]
    assert products == {"s": 1, "conditions_hold": True, "bound": "4", "within_bound": True}


# ---- construct / jconst ----


def test_construct_charvec_feeds_search_and_witness(tmp_path: Path) -> None:
    pts = tmp_path / "pts.json"
    assert _run(["construct", "charvec", "--n", "4", "--s", "2", "--out", str(pts)]) == 0
    document = json.loads(pts.read_text(encoding="utf-8"))
    assert document["size"] == 6 and document["palette"] == ["2", "4"]
    poly = tmp_path / "poly.json"
    assert _run(["witness", "build", "--points", str(pts), "--out", str(poly)]) == 0
    assert _run(["witness", "check", "--poly", str(poly), "--points", str(pts)]) == 0


def test_construct_box(tmp_path: Path) -> None:
    out = tmp_path / "box_report.json"
    assert _run(["construct", "box", "--n", "2", "--q", "3", "--out", str(out)]) == 0
    document = json.loads(out.read_text(encoding="utf-8"))
    assert document["s_achieved"] == 5
    assert document["palette"] == ["1", "2", "4", "5", "8"]


def test_construct_charvec_bad_s_exits_1() -> None:
    assert _run(["construct", "charvec", "--n", "3", "--s", "5"]) == 1


def test_jconst_table_and_limit(tmp_path: Path) -> None:
    out = tmp_path / "j.json"
    assert _run(["jconst", "--t", "3", "4", "--limit", "--range-check", "--out", str(out)]) == 0
    document = json.loads(out.read_text(encoding="utf-8"))
    assert [v["t"] for v in document["values"]] == [3, 4]
    assert abs(document["values"][0]["value"] - 0.9184) < 5e-5
    assert abs(0.5 * (document["limit"]["lower"] + document["limit"]["upper"]) - 0.8414) < 1e-4
    assert document["range_check"] == {"3": True, "4": True}


# ---- Config ----


def test_load_config_reads_no_color(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("NO_COLOR", raising=False)
    assert load_config() == AppConfig(no_color=False)
    monkeypatch.setenv("NO_COLOR", "1")
    assert load_config() == AppConfig(no_color=True)
