"""Deterministic CSV and JSON interchange helpers.

Floats are written with repr (shortest round-trip form), so rerunning a
command with the same seed produces byte-identical files.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np


def format_float(x: float) -> str:
    return repr(float(x))


def write_table_csv(path: str | Path, columns: Mapping[str, Sequence]) -> None:
    """Write named columns of equal length as CSV with a header row."""
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    n_rows = len(arrays[0])
    for name, arr in zip(names, arrays):
        if len(arr) != n_rows:
            raise ValueError(f"column {name!r} has length {len(arr)}, expected {n_rows}")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for k in range(n_rows):
            row = []
            for arr in arrays:
                v = arr[k]
                if isinstance(v, (bool, np.bool_)):
                    row.append("1" if v else "0")
                elif isinstance(v, (int, np.integer)):
                    row.append(str(int(v)))
                else:
                    row.append(format_float(v))
            writer.writerow(row)


def read_table_csv(path: str | Path, expected: Sequence[str] | None = None,
                   ) -> dict[str, np.ndarray]:
    """Read a CSV written by write_table_csv back into float64 columns."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty CSV") from None
        if expected is not None and list(header) != list(expected):
            raise ValueError(
                f"{path}: expected columns {list(expected)}, found {header}")
        rows = [row for row in reader if row]
    data = np.array(rows, dtype=float)
    if data.size == 0:
        return {name: np.empty(0) for name in header}
    return {name: data[:, k] for k, name in enumerate(header)}


def write_complex_csv(path: str | Path, freq_name: str, freqs: Sequence,
                      values: Sequence) -> None:
    vals = np.asarray(values)
    write_table_csv(path, {freq_name: freqs, "re": vals.real, "im": vals.imag})


def read_complex_csv(path: str | Path, freq_name: str | None = None,
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Read (axis, complex values); freq_name defaults to the file's own."""
    cols = read_table_csv(path)
    names = list(cols)
    if freq_name is None:
        if len(names) != 3 or names[1:] != ["re", "im"]:
            raise ValueError(
                f"{path}: expected columns (axis, re, im), found {names}")
        freq_name = names[0]
    elif names != [freq_name, "re", "im"]:
        raise ValueError(
            f"{path}: expected columns {[freq_name, 're', 'im']}, found {names}")
    return cols[freq_name], cols["re"] + 1j * cols["im"]


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def write_json_report(path: str | Path, report: dict) -> None:
    """Write a JSON report with sorted keys for reproducible bytes."""
    with open(path, "w") as fh:
        json.dump(_sanitize(report), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json_report(path: str | Path) -> dict:
    with open(path) as fh:
        return json.load(fh)
