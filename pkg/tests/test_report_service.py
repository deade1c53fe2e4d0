"""
Result writers
"""
import json
import math

import numpy as np
import pytest

from models.schemas import OutputFormat
from services.report_service import atomic_open, format_value, render_csv, render_json, write_table


def test_format_value():
    assert format_value(0.1) == "0.1"
    assert format_value(math.inf) == "inf"
    assert format_value(-math.inf) == "-inf"
    assert format_value(np.float64(2.5)) == "2.5"
    assert format_value(3) == 3
    assert format_value(None) is None


def test_render_csv_keeps_full_precision():
    text = render_csv(["a", "b"], [[1.0 / 3.0, math.inf]])
    assert text.splitlines() == ["a,b", f"{1.0 / 3.0!r},inf"]


def test_render_json_meta_and_tokens():
    document = json.loads(render_json(["r", "bound"], [[math.inf, None], [np.float64(1.5), 0.2]], {"n": np.int64(8)}))
    assert document["meta"] == {"n": 8}
    assert document["rows"][0] == {"r": "inf", "bound": None}
    assert document["rows"][1]["r"] == 1.5


def test_write_table_to_file(tmp_path):
    path = tmp_path / "nested" / "out.json"
    write_table(["x"], [[1.0], [2.0]], str(path), OutputFormat.JSON)
    assert [row["x"] for row in json.loads(path.read_text())["rows"]] == [1.0, 2.0]


def test_atomic_open_leaves_nothing_on_failure(tmp_path):
    path = tmp_path / "out.csv"
    path.write_text("previous\n")
    with pytest.raises(RuntimeError):
        with atomic_open(str(path)) as handle:
            handle.write("partial")
            raise RuntimeError("boom")
    assert path.read_text() == "previous\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]
