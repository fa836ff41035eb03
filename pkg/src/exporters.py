"""Artifact writers: prefix CSV/JSON, report JSON, JSON lines, plot data, tables.

All files are written atomically: the content goes to a temporary file in
the target directory, which then replaces the target with ``os.replace``.

Prefix rows carry the exact value text (``p/q`` or ``ln(k)``), a fixed-point
approximation for display, the ``;``-joined representations and an
irreducibility flag. ``prefix_from_json`` rebuilds the Prefix from the JSON
export field by field.

Dependencies:
    csv, io, json, os, tempfile, src.liken_core, src.families, src.exactnum.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Union

from src.errors import SpecConfigError
from src.exactnum import approx_text, format_value, parse_value
from src.families import spec_from_config
from src.liken_core import Element, Prefix, format_reps, parse_reps

PREFIX_FIELDS = ("index", "value_text", "value_approx_1e-12", "reps", "irreducible_flag")

PathLike = Union[str, Path]


# ---------------------------------------------------------------------------
# Atomic writes
# ---------------------------------------------------------------------------

def write_text_atomic(path: PathLike, text: str) -> Path:
    """Write ``text`` to ``path`` through a temporary file and ``os.replace``."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return target


def write_json(path: PathLike, payload: Any) -> Path:
    return write_text_atomic(path, json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")


def write_jsonl(path: PathLike, rows: Iterable[Dict[str, Any]]) -> Path:
    return write_text_atomic(path, "".join(json.dumps(row, sort_keys=True, default=str) + "\n" for row in rows))


def read_jsonl(path: PathLike) -> List[Dict[str, Any]]:
    """Rows of a JSON-lines file; blank lines are skipped.

    Raises:
        SpecConfigError: The file is unreadable or a line is not a JSON object.
    """
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        rows = [json.loads(line) for line in lines if line.strip()]
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecConfigError(f"cannot read {path}: {exc}") from exc
    if not all(isinstance(row, dict) for row in rows):
        raise SpecConfigError(f"{path}: every line must be a JSON object")
    return rows


# ---------------------------------------------------------------------------
# Prefix export
# ---------------------------------------------------------------------------

def prefix_rows(prefix: Prefix) -> List[Dict[str, Any]]:
    irreducible = set(prefix.irreducible_indices)
    return [
        {
            "index": e.index,
            "value_text": format_value(e.value),
            "value_approx_1e-12": approx_text(e.value),
            "reps": format_reps(e.reps),
            "irreducible_flag": e.index in irreducible,
        }
        for e in prefix.elements
    ]


def prefix_csv_text(prefix: Prefix) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(PREFIX_FIELDS), lineterminator="\n")
    writer.writeheader()
    for row in prefix_rows(prefix):
        writer.writerow({**row, "irreducible_flag": int(row["irreducible_flag"])})
    return buffer.getvalue()


def _spec_config(prefix: Prefix) -> Dict[str, Any]:
    try:
        return prefix.spec.to_config()
    except SpecConfigError:
        return {"kind": prefix.spec.kind.value, "name": prefix.spec.name, "stream": True}


def prefix_to_json(prefix: Prefix) -> Dict[str, Any]:
    """JSON document for a prefix; ``prefix_from_json`` inverts it.

    Returns:
        ``{"spec", "name", "value_kind", "length", "generators", "elements"}``
        where ``elements`` are ``prefix_rows`` dicts.
    """
    return {
        "spec": _spec_config(prefix),
        "name": prefix.spec.name,
        "value_kind": prefix.kind.value,
        "length": len(prefix),
        "generators": [format_value(g) for g in prefix.generators],
        "elements": prefix_rows(prefix),
    }


def prefix_from_json(document: Dict[str, Any]) -> Prefix:
    """Rebuild a Prefix from ``prefix_to_json`` output.

    Raises:
        SpecConfigError: The document lacks a rebuildable spec config or is
            malformed.
    """
    config = document.get("spec")
    if not isinstance(config, dict) or config.get("stream"):
        raise SpecConfigError("prefix document has no rebuildable spec config")
    spec = spec_from_config(config)
    try:
        elements = tuple(
            Element(int(row["index"]), parse_value(row["value_text"]), parse_reps(row["reps"]))
            for row in document["elements"]
        )
        generators = tuple(parse_value(g) for g in document["generators"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SpecConfigError(f"malformed prefix document: {exc}") from exc
    return Prefix(spec=spec, elements=elements, generators=generators)


def write_prefix(prefix: Prefix, path: PathLike, fmt: str = "json") -> Path:
    if fmt == "csv":
        return write_text_atomic(path, prefix_csv_text(prefix))
    if fmt == "json":
        return write_json(path, prefix_to_json(prefix))
    if fmt == "table":
        rows = [[r[f] for f in PREFIX_FIELDS[:-1]] + [int(r["irreducible_flag"])] for r in prefix_rows(prefix)]
        return write_text_atomic(path, render_table(list(PREFIX_FIELDS), rows))
    raise ValueError(f"unknown prefix format {fmt!r}")


# ---------------------------------------------------------------------------
# Plot data and tables
# ---------------------------------------------------------------------------

def legendre_dat_text(series: Sequence[Tuple[int, Fraction]]) -> str:
    """Two whitespace-separated columns ``n ratio`` with a comment header."""
    lines = ["# n ratio"]
    lines.extend(f"{n} {float(ratio):.12f}" for n, ratio in series)
    return "\n".join(lines) + "\n"


def write_legendre_dat(path: PathLike, series: Sequence[Tuple[int, Fraction]]) -> Path:
    return write_text_atomic(path, legendre_dat_text(series))


def render_table(headers: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    """Left-aligned text table with a dashed rule under the header."""
    table = [[str(h) for h in headers]] + [[str(cell) for cell in row] for row in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(headers))]

    def fmt(row: Sequence[str]) -> str:
        return "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()

    lines = [fmt(table[0]), "  ".join("-" * w for w in widths)]
    lines.extend(fmt(row) for row in table[1:])
    return "\n".join(lines) + "\n"


def report_table(reports: Iterable[Dict[str, Any]]) -> str:
    """Table of property report dicts: id, verdict, qualifier, first witness."""
    rows = []
    for report in reports:
        witnesses = report.get("witnesses") or []
        first = ""
        if witnesses:
            w = witnesses[0]
            first = f"n={w['indices']} {', '.join(w['values'])}"
        rows.append([report["property_id"], report["verdict"], report.get("qualifier") or "", first])
    return render_table(["property", "verdict", "qualifier", "first witness"], rows)
