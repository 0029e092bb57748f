"""Tests for the CSV and JSON writers."""

import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from wz_borel.formats import dumps_json, render_csv, write_text
from wz_borel.scalars import zeta


@pytest.mark.unit
class TestRenderCsv:
    def test_floats_use_round_trip_repr(self):
        text = render_csv([[1, 0.1, np.float64(1 / 3)]], header=["n", "a", "b"])
        assert text == "n,a,b\n1,0.1,0.3333333333333333\n"

    def test_unix_line_endings(self):
        text = render_csv([[1], [2]])
        assert "\r" not in text
        assert text.splitlines() == ["1", "2"]

    def test_non_float_cells_use_str(self):
        assert render_csv([[Fraction(-2, 3), True]]) == "-2/3,True\n"


@pytest.mark.unit
class TestDumpsJson:
    def test_sorted_keys(self):
        text = dumps_json({"b": 1, "a": 2})
        assert text.index('"a"') < text.index('"b"')

    def test_domain_values(self):
        payload = {
            "z": complex(1.5, -2.0),
            "q": Fraction(3, 4),
            "zeta": zeta(3),
            "i": np.int64(7),
            "f": np.float32(0.5),
            "v": np.array([1, 2]),
        }
        data = json.loads(dumps_json(payload))
        assert data["z"] == {"re": 1.5, "im": -2.0}
        assert data["q"] == {"terms": [{"zetas": {}, "num": "3", "den": "4"}]}
        assert data["zeta"]["terms"][0]["zetas"] == {"3": 1}
        assert data["i"] == 7
        assert data["f"] == 0.5
        assert data["v"] == [1, 2]

    def test_unknown_type(self):
        with pytest.raises(TypeError):
            dumps_json({"x": object()})


@pytest.mark.unit
class TestWriteText:
    def test_needs_a_target(self):
        with pytest.raises(ValueError):
            write_text("hello")

    def test_stream(self):
        buffer = io.StringIO()
        write_text("hello\n", stream=buffer)
        assert buffer.getvalue() == "hello\n"

    def test_path_creates_directories(self, tmp_path):
        path = tmp_path / "nested" / "out.csv"
        write_text("a\nb\n", path=str(path))
        assert path.read_bytes() == b"a\nb\n"
