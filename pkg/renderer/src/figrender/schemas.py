"""Readers for the published experiment CSV schemas.

Two file kinds exist:

* trajectory CSV: header ``t,x_1,...,y_1,...`` for two-player runs or
  ``t,p1_1,...,pK_1,...`` for player networks, one float row per sample;
* sweep CSV: one row per frequency with the fixed fourteen-column header
  (booleans lowercase, analytic columns empty when not applicable).

Readers validate the header before touching any data and report column-level
diagnostics on mismatch.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SWEEP_COLUMNS = (
    "omega", "ratio_1", "resonant", "x_max", "x_min", "avg_x", "avg_y",
    "converged", "boundary_touched", "div_x", "div_y", "limit_x", "limit_y",
    "status",
)

_SWEEP_FLOATS = ("omega", "ratio_1", "x_max", "x_min", "avg_x", "avg_y")
_SWEEP_BOOLS = ("resonant", "converged", "boundary_touched")
_SWEEP_OPTIONAL = ("div_x", "div_y", "limit_x", "limit_y")

_COORD_PATTERN = re.compile(r"^(x|y|p\d+)_(\d+)$")


class SchemaError(ValueError):
    """An input file does not match the published CSV schema."""


def _read_rows(path: str | Path) -> tuple[list[str], list[list[str]]]:
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"input file not found: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise SchemaError(f"{path}: empty file, expected a header row")
    return rows[0], rows[1:]


@dataclass(frozen=True)
class TrajectoryTable:
    """Sampled run: times plus one column per strategy coordinate."""

    path: str
    times: np.ndarray
    columns: tuple[str, ...]
    values: np.ndarray

    def column(self, name: str) -> np.ndarray:
        if name not in self.columns:
            raise SchemaError(
                f"{self.path}: no column {name!r}; has {self.columns}")
        return self.values[:, self.columns.index(name)]

    def running_average(self) -> np.ndarray:
        """Trapezoid running mean of every coordinate column."""
        t, v = self.times, self.values
        steps = 0.5 * (v[1:] + v[:-1]) * (t[1:] - t[:-1])[:, None]
        out = np.empty_like(v)
        out[0] = v[0]
        span = t[1:] - t[0]
        out[1:] = np.cumsum(steps, axis=0) / span[:, None]
        return out


def read_trajectory(path: str | Path) -> TrajectoryTable:
    header, rows = _read_rows(path)
    if not header or header[0] != "t":
        raise SchemaError(
            f"{path}: first column must be 't', found "
            f"{header[0] if header else 'nothing'!r}")
    bad = [name for name in header[1:] if not _COORD_PATTERN.match(name)]
    if bad or len(header) < 2:
        raise SchemaError(
            f"{path}: coordinate columns must look like x_1/y_1/p1_1, "
            f"found unexpected {bad}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    try:
        data = np.array([[float(cell) for cell in row] for row in rows])
    except ValueError as exc:
        raise SchemaError(f"{path}: non-numeric cell ({exc})")
    if data.shape[1] != len(header):
        raise SchemaError(
            f"{path}: rows have {data.shape[1]} cells, header has "
            f"{len(header)}")
    return TrajectoryTable(path=str(path), times=data[:, 0],
                           columns=tuple(header[1:]), values=data[:, 1:])


@dataclass(frozen=True)
class SweepTable:
    """One frequency sweep: typed arrays, one entry per CSV row."""

    path: str
    omega: np.ndarray
    ratio: np.ndarray
    resonant: np.ndarray
    x_max: np.ndarray
    x_min: np.ndarray
    avg_x: np.ndarray
    avg_y: np.ndarray
    converged: np.ndarray
    boundary_touched: np.ndarray
    div_x: np.ndarray
    div_y: np.ndarray
    limit_x: np.ndarray
    limit_y: np.ndarray
    status: tuple[str, ...]

    def __len__(self) -> int:
        return self.omega.size


def _parse_bool(cell: str, column: str, path) -> bool:
    if cell == "true":
        return True
    if cell == "false":
        return False
    raise SchemaError(
        f"{path}: column {column!r} must be true/false, found {cell!r}")


def read_sweep(path: str | Path) -> SweepTable:
    header, rows = _read_rows(path)
    if tuple(header) != SWEEP_COLUMNS:
        missing = [c for c in SWEEP_COLUMNS if c not in header]
        extra = [c for c in header if c not in SWEEP_COLUMNS]
        if missing or extra:
            raise SchemaError(
                f"{path}: sweep header mismatch; missing columns "
                f"{missing}, unexpected columns {extra}")
        raise SchemaError(
            f"{path}: sweep columns are out of order: {header}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    cols: dict[str, list] = {name: [] for name in SWEEP_COLUMNS}
    for row in rows:
        if len(row) != len(SWEEP_COLUMNS):
            raise SchemaError(
                f"{path}: row has {len(row)} cells, expected "
                f"{len(SWEEP_COLUMNS)}")
        for name, cell in zip(SWEEP_COLUMNS, row):
            if name == "status":
                cols[name].append(cell)
            elif name in _SWEEP_BOOLS:
                cols[name].append(_parse_bool(cell, name, path))
            elif name in _SWEEP_OPTIONAL and cell == "":
                cols[name].append(np.nan)
            else:
                try:
                    cols[name].append(float(cell))
                except ValueError:
                    raise SchemaError(
                        f"{path}: column {name!r} has non-numeric cell "
                        f"{cell!r}")
    return SweepTable(
        path=str(path),
        omega=np.array(cols["omega"]),
        ratio=np.array(cols["ratio_1"]),
        resonant=np.array(cols["resonant"], dtype=bool),
        x_max=np.array(cols["x_max"]),
        x_min=np.array(cols["x_min"]),
        avg_x=np.array(cols["avg_x"]),
        avg_y=np.array(cols["avg_y"]),
        converged=np.array(cols["converged"], dtype=bool),
        boundary_touched=np.array(cols["boundary_touched"], dtype=bool),
        div_x=np.array(cols["div_x"]),
        div_y=np.array(cols["div_y"]),
        limit_x=np.array(cols["limit_x"]),
        limit_y=np.array(cols["limit_y"]),
        status=tuple(cols["status"]),
    )
