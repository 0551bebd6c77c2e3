"""Readers for the benchmark CSV schema and the field-dump directories.

The benchmark CSV has one row per run with the columns listed in
BENCH_COLUMNS.  A dump directory holds manifest.txt (key = value lines),
history.csv (per-iteration objective terms) and per-slice text files
control_k*.txt / state_k*.txt / adjoint_k*.txt with node coordinates
followed by the value on each line.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

__all__ = [
    "MissingColumnError",
    "EmptySelectionError",
    "BENCH_COLUMNS",
    "read_bench_csv",
    "select_rows",
    "read_history",
    "read_manifest",
    "read_slices",
]

BENCH_COLUMNS = [
    "case", "method", "dim", "n_h", "K", "J_final", "misfit_term",
    "reg_term", "iterations", "stop_reason", "wall_time_seconds",
    "projected_gradient_norm",
]

HISTORY_COLUMNS = ["iteration", "objective", "misfit", "regularization", "step_size"]

_NUMERIC = {"dim": int, "n_h": int, "K": int, "J_final": float,
            "misfit_term": float, "reg_term": float, "iterations": int,
            "wall_time_seconds": float, "projected_gradient_norm": float}


class MissingColumnError(ValueError):
    """An input file lacks a column the figure needs."""


class EmptySelectionError(ValueError):
    """The requested filters match no rows."""


def _require(present, needed, where):
    missing = [c for c in needed if c not in present]
    if missing:
        raise MissingColumnError(f"{where} is missing column(s) {missing}")


def read_bench_csv(path) -> list[dict]:
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise MissingColumnError(f"{path} is empty")
        _require(reader.fieldnames, BENCH_COLUMNS, path)
        rows = []
        for raw in reader:
            row = dict(raw)
            for key, cast in _NUMERIC.items():
                row[key] = cast(float(raw[key])) if cast is int else cast(raw[key])
            rows.append(row)
    return rows


def select_rows(rows, case=None, method=None, n_h=None) -> list[dict]:
    out = [r for r in rows
           if (case is None or r["case"] == case)
           and (method is None or r["method"] == method)
           and (n_h is None or r["n_h"] == int(n_h))]
    if not out:
        raise EmptySelectionError(
            f"no rows match case={case!r} method={method!r} n_h={n_h!r}")
    return out


def read_history(path) -> dict:
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise MissingColumnError(f"{path} is empty")
        _require(reader.fieldnames, HISTORY_COLUMNS, path)
        cols = {c: [] for c in HISTORY_COLUMNS}
        for raw in reader:
            for c in HISTORY_COLUMNS:
                cols[c].append(float(raw[c]))
    return {c: np.asarray(v) for c, v in cols.items()}


def read_manifest(dump_dir) -> dict:
    path = Path(dump_dir) / "manifest.txt"
    entries = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if "=" in line:
                key, value = line.split("=", 1)
                entries[key.strip()] = value.strip()
    return entries


def read_slices(dump_dir, kind: str) -> list[np.ndarray]:
    """All slices of one field, sorted by time index.

    Each array has the node coordinates in the leading columns and the
    value in the last one.
    """
    files = sorted(Path(dump_dir).glob(f"{kind}_k*.txt"))
    if not files:
        raise EmptySelectionError(f"no {kind} slices found in {dump_dir}")
    return [np.atleast_2d(np.loadtxt(f)) for f in files]
