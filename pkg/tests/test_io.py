"""Deterministic file interchange: repr floats, exact round trips."""
from __future__ import annotations

import numpy as np
import pytest

from transducersim import io


def test_table_round_trip_is_exact(tmp_path):
    path = tmp_path / "t.csv"
    x = np.array([1.0, 1.0 / 3.0, 2.5e-17, 1e300])
    y = np.array([0.1, -0.2, 0.3, np.pi])
    io.write_table_csv(path, {"x": x, "y": y})
    cols = io.read_table_csv(path)
    assert list(cols) == ["x", "y"]
    assert (cols["x"] == x).all()
    assert (cols["y"] == y).all()


def test_table_bool_and_int_columns(tmp_path):
    path = tmp_path / "t.csv"
    io.write_table_csv(path, {
        "flag": np.array([True, False, True]),
        "k": np.array([3, -1, 7]),
        "v": np.array([0.5, 1.5, 2.5]),
    })
    text = path.read_text().splitlines()
    assert text[0] == "flag,k,v"
    assert text[1] == "1,3,0.5"
    cols = io.read_table_csv(path, expected=("flag", "k", "v"))
    assert (cols["flag"] == np.array([1.0, 0.0, 1.0])).all()
    with pytest.raises(ValueError, match="expected columns"):
        io.read_table_csv(path, expected=("a", "b"))


def test_table_rejects_ragged_columns(tmp_path):
    with pytest.raises(ValueError, match="length"):
        io.write_table_csv(tmp_path / "t.csv", {"a": [1.0], "b": [1.0, 2.0]})


def test_complex_round_trip_and_axis_inference(tmp_path):
    path = tmp_path / "s.csv"
    freqs = np.linspace(3.59e9, 3.60e9, 5)
    vals = np.exp(1j * np.linspace(0.0, 2.0, 5)) * np.linspace(0.2, 1.0, 5)
    io.write_complex_csv(path, "freq_hz", freqs, vals)
    f2, v2 = io.read_complex_csv(path, "freq_hz")
    assert (f2 == freqs).all() and (v2 == vals).all()
    # The axis name is recovered from the header when not supplied.
    f3, v3 = io.read_complex_csv(path)
    assert (f3 == freqs).all() and (v3 == vals).all()
    with pytest.raises(ValueError, match="expected columns"):
        io.read_complex_csv(path, "time_s")


def test_complex_read_rejects_wrong_shape(tmp_path):
    path = tmp_path / "t.csv"
    io.write_table_csv(path, {"a": [1.0], "b": [2.0]})
    with pytest.raises(ValueError, match="expected columns"):
        io.read_complex_csv(path)


def test_json_report_bytes_are_stable(tmp_path):
    report = {
        "z": complex(1.5, -2.5),
        "arr": np.array([1.0, 2.0]),
        "n": np.int64(3),
        "x": np.float64(0.1),
        "flag": np.bool_(True),
        "nested": {"b": 2, "a": 1},
    }
    p1 = tmp_path / "r1.json"
    p2 = tmp_path / "r2.json"
    io.write_json_report(p1, report)
    io.write_json_report(p2, dict(reversed(report.items())))
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text().endswith("\n")
    back = io.read_json_report(p1)
    assert back["z"] == {"re": 1.5, "im": -2.5}
    assert back["arr"] == [1.0, 2.0]
    assert back["n"] == 3 and back["flag"] is True


def test_empty_csv_raises(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(ValueError, match="empty CSV"):
        io.read_table_csv(path)
