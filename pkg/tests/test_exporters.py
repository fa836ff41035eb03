"""Unit tests for src.exporters: atomic writes, prefix CSV/JSON, plot data, tables."""
from __future__ import annotations

import csv
import io
import json
import os
from fractions import Fraction

import pytest

from src.errors import SpecConfigError
from src.exactnum import Value, ValueKind
from src.exporters import (
    PREFIX_FIELDS,
    legendre_dat_text,
    prefix_csv_text,
    prefix_from_json,
    prefix_rows,
    prefix_to_json,
    read_jsonl,
    render_table,
    report_table,
    write_json,
    write_jsonl,
    write_prefix,
    write_text_atomic,
)
from src.families import family_custom
from src.liken_core import Count, enumerate_prefix
from tests.liken_helpers import nstar_prefix, numerical_prefix


# ---------------------------------------------------------------------------
# Atomic writes
# ---------------------------------------------------------------------------

class TestAtomicWrites:
    """write_text_atomic and the JSON writers."""

    def test_creates_parents_and_leaves_no_temp_files(self, tmp_path):
        target = tmp_path / "a" / "b" / "out.txt"
        write_text_atomic(target, "one")
        write_text_atomic(target, "two")
        assert target.read_text(encoding="utf-8") == "two"
        assert os.listdir(target.parent) == ["out.txt"]

    def test_failed_replace_keeps_old_content(self, tmp_path, monkeypatch):
        target = tmp_path / "out.txt"
        target.write_text("old", encoding="utf-8")

        def boom(src, dst):
            raise OSError("disk full")

        monkeypatch.setattr(os, "replace", boom)
        with pytest.raises(OSError):
            write_text_atomic(target, "new")
        assert target.read_text(encoding="utf-8") == "old"
        assert os.listdir(tmp_path) == ["out.txt"]

    def test_json_and_jsonl(self, tmp_path):
        write_json(tmp_path / "r.json", {"b": 1, "a": Fraction(1, 2)})
        assert json.loads((tmp_path / "r.json").read_text()) == {"a": "1/2", "b": 1}
        write_jsonl(tmp_path / "t.jsonl", [{"n": 0}, {"n": 1}])
        lines = (tmp_path / "t.jsonl").read_text().splitlines()
        assert [json.loads(line)["n"] for line in lines] == [0, 1]

    def test_read_jsonl(self, tmp_path):
        path = write_jsonl(tmp_path / "t.jsonl", [{"n": 0}, {"n": 1}])
        path.write_text(path.read_text() + "\n")
        assert read_jsonl(path) == [{"n": 0}, {"n": 1}]

    @pytest.mark.parametrize("text", ['{"n": 0}\n[1, 2]\n', '{"n": 0\n'])
    def test_read_jsonl_rejects_bad_lines(self, tmp_path, text):
        path = tmp_path / "t.jsonl"
        path.write_text(text)
        with pytest.raises(SpecConfigError):
            read_jsonl(path)
        with pytest.raises(SpecConfigError):
            read_jsonl(tmp_path / "absent.jsonl")


# ---------------------------------------------------------------------------
# Prefix export
# ---------------------------------------------------------------------------

class TestPrefixExport:
    """prefix_rows, CSV and JSON documents."""

    def test_rows(self):
        rows = prefix_rows(nstar_prefix(4))
        assert [r["value_text"] for r in rows] == ["ln(1)", "ln(2)", "ln(3)", "ln(4)"]
        assert [r["reps"] for r in rows[1:]] == ["1^1", "2^1", "1^2"]
        assert [r["irreducible_flag"] for r in rows] == [False, True, True, False]
        assert rows[1]["value_approx_1e-12"] == "0.693147180560"

    def test_csv(self):
        text = prefix_csv_text(numerical_prefix([3, 4, 5], 7))
        rows = list(csv.DictReader(io.StringIO(text)))
        assert tuple(rows[0]) == PREFIX_FIELDS
        assert rows[6]["value_text"] == "8/1"
        assert rows[6]["reps"] == "1^1*3^1;2^2"
        assert rows[1]["irreducible_flag"] == "1" and rows[6]["irreducible_flag"] == "0"

    def test_json_document(self):
        document = prefix_to_json(numerical_prefix([3, 4, 5], 5))
        assert document["spec"] == {"kind": "numerical", "gens": [3, 4, 5]}
        assert document["value_kind"] == "rational"
        assert document["length"] == 5
        assert document["generators"] == ["3/1", "4/1", "5/1"]

    def test_rebuild_from_json(self, tmp_path):
        prefix = nstar_prefix(30)
        path = write_prefix(prefix, tmp_path / "prefix.json")
        rebuilt = prefix_from_json(json.loads(path.read_text()))
        assert rebuilt.keys == prefix.keys
        assert [e.reps for e in rebuilt.elements] == [e.reps for e in prefix.elements]
        assert rebuilt.generators == prefix.generators
        assert rebuilt.spec.name == prefix.spec.name

    def test_stream_spec_cannot_be_rebuilt(self):
        spec = family_custom(lambda: (Value.logint(k) for k in (2, 3)), kind=ValueKind.LOGINT)
        document = prefix_to_json(enumerate_prefix(spec, Count(4)))
        assert document["spec"]["stream"] is True
        with pytest.raises(SpecConfigError):
            prefix_from_json(document)

    def test_malformed_document(self):
        document = prefix_to_json(nstar_prefix(3))
        del document["elements"][1]["reps"]
        with pytest.raises(SpecConfigError):
            prefix_from_json(document)

    def test_write_formats(self, tmp_path):
        prefix = nstar_prefix(3)
        table = write_prefix(prefix, tmp_path / "p.txt", fmt="table").read_text()
        assert table.splitlines()[0].split() == list(PREFIX_FIELDS)
        assert write_prefix(prefix, tmp_path / "p.csv", fmt="csv").read_text() == prefix_csv_text(prefix)
        with pytest.raises(ValueError):
            write_prefix(prefix, tmp_path / "p.xml", fmt="xml")


# ---------------------------------------------------------------------------
# Plot data and tables
# ---------------------------------------------------------------------------

class TestTables:
    """legendre_dat_text, render_table, report_table."""

    def test_legendre_dat(self):
        text = legendre_dat_text([(9, Fraction(4, 9)), (99, Fraction(25, 99))])
        assert text == "# n ratio\n9 0.444444444444\n99 0.252525252525\n"

    def test_render_table(self):
        assert render_table(["a", "bb"], [[1, "x"], [22, "yyy"]]) == "a   bb\n--  ---\n1   x\n22  yyy\n"

    def test_report_table(self):
        text = report_table(
            [
                {"property_id": "convexity", "verdict": "pass", "qualifier": None, "witnesses": []},
                {
                    "property_id": "or",
                    "verdict": "fail",
                    "qualifier": None,
                    "witnesses": [{"indices": [2, 3], "values": ["ln(5)", "ln(9)", "ln(7)"], "note": ""}],
                },
            ]
        )
        lines = text.splitlines()
        assert lines[0].split() == ["property", "verdict", "qualifier", "first", "witness"]
        assert lines[2].split() == ["convexity", "pass"]
        assert lines[3].endswith("n=[2, 3] ln(5), ln(9), ln(7)")
