"""JSON / CSV writers that embed the RunManifest.

Data goes to `out` when given, otherwise to stdout; the rich console writes
to stderr, so stdout stays machine-readable.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from collections.abc import Iterable, Mapping
from pathlib import Path
from typing import Any

from few_distance_box.config import CSV_MANIFEST_PREFIX
from few_distance_box.models import RunManifest


def render_json(payload: Mapping[str, Any], manifest: RunManifest) -> str:
    document = {"manifest": manifest.to_dict(), **payload}
    return json.dumps(document, indent=2) + "\n"


def render_csv(
    rows: Iterable[Mapping[str, str]],
    columns: list[str],
    manifest: RunManifest | None,
) -> str:
    """CSV text; a `# manifest: {...}` line leads when a manifest is given."""
    buffer = io.StringIO()
    if manifest is not None:
        buffer.write(CSV_MANIFEST_PREFIX + json.dumps(manifest.to_dict()) + "\n")
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row.get(c, "") for c in columns})
    return buffer.getvalue()


def write_json(payload: Mapping[str, Any], manifest: RunManifest, out: Path | None) -> None:
    _emit(render_json(payload, manifest), out)


def write_csv(
    rows: Iterable[Mapping[str, str]],
    columns: list[str],
    manifest: RunManifest,
    out: Path | None,
) -> None:
    # the manifest line is only added to files; stdout stays plain CSV
    _emit(render_csv(rows, columns, manifest if out is not None else None), out)


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
