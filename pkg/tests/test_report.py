import json

import numpy as np
import pytest

from certilab.components.report import CSV_COLUMNS, emit_csv, emit_json, records_frame, render_records, to_json
from certilab.utils.errors import CertilabError
from certilab.utils.scaling import SweepRecord


def record(N, p, value, quantity="distance"):
    return SweepRecord("ghz", N, p, quantity, value, "pairwise")


def test_empty_csv_is_header_only(tmp_path):
    path = emit_csv([], tmp_path / "empty.csv")
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_single_record_csv(tmp_path):
    path = emit_csv([record(2, 0.9, 0.81)], tmp_path / "one.csv")
    assert path.read_text().splitlines() == [",".join(CSV_COLUMNS), "ghz,2,0.9,distance,0.81,pairwise"]


def test_rows_sorted_by_n_then_p():
    df = records_frame([record(3, 0.9, 0.729), record(2, 0.9, 0.81), record(2, 0.5, 0.25)])
    assert list(zip(df["N"], df["p"])) == [(2, 0.5), (2, 0.9), (3, 0.9)]


def test_sort_is_stable_for_equal_keys():
    df = records_frame([record(2, 0.9, 0.5, "b"), record(2, 0.9, 0.4, "a")])
    assert list(df["quantity"]) == ["b", "a"]


def test_unwritable_paths_raise(tmp_path):
    missing = tmp_path / "missing" / "out.csv"
    with pytest.raises(CertilabError):
        emit_csv([record(2, 0.9, 0.81)], missing)
    with pytest.raises(CertilabError):
        emit_json({}, tmp_path / "missing" / "out.json")


def test_json_is_sorted_and_newline_terminated():
    text = to_json({"b": np.float64(0.5), "a": np.arange(2), "c": np.int64(3)})
    assert text.endswith("\n")
    assert list(json.loads(text)) == ["a", "b", "c"]
    assert json.loads(text) == {"a": [0, 1], "b": 0.5, "c": 3}
    with pytest.raises(TypeError):
        to_json({"x": object()})


def test_emit_json_adds_schema_version(tmp_path):
    path = emit_json({"command": "gap"}, tmp_path / "gap.json")
    assert json.loads(path.read_text()) == {"schema_version": "1", "command": "gap"}


def test_render_records():
    assert render_records([]) == "(no records)"
    table = render_records([record(2, 0.9, 0.81)])
    assert "distance" in table
    assert "0.81" in table
