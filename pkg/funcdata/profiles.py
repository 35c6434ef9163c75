"""Raw profile ingestion (interpolation onto a grid) and the CSV formats.

Two CSV layouts are understood:

* long format ``id,position_mm,diameter_mm[,label]`` with one row per
  measured point of a raw profile;
* wide format ``id,label,v_1,...,v_G`` with one row per pre-gridded sample.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from errors import DataShapeError, GridError
from funcdata.grid import Grid
from funcdata.samples import Dataset, FunctionalSample

LONG_HEADER = ("id", "position_mm", "diameter_mm")
_COVER_TOL = 1e-9


def _linear(positions: np.ndarray, values: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    return np.interp(nodes, positions, values)


def _cubic(positions: np.ndarray, values: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    spline = CubicSpline(positions, values, bc_type="not-a-knot", extrapolate=False)
    out = spline(np.clip(nodes, positions[0], positions[-1]))
    return np.asarray(out, dtype=float)


INTERPOLANTS: dict[str, Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]] = {
    "linear": _linear,
    "cubic": _cubic,
}


@dataclass(frozen=True, eq=False)
class RawProfile:
    """A measured profile before resampling: ragged positions and values."""

    id: int
    positions: np.ndarray
    values: np.ndarray
    label: float | None = None

    @property
    def length(self) -> float:
        return float(self.positions[-1])


def truncate_interval(
    positions: np.ndarray, values: np.ndarray, lower: float, upper: float
) -> tuple[np.ndarray, np.ndarray]:
    """Restrict a profile to [lower, upper], adding interpolated end knots."""
    inside = (positions > lower) & (positions < upper)
    ends = np.interp([lower, upper], positions, values)
    new_positions = np.concatenate(([lower], positions[inside], [upper]))
    new_values = np.concatenate(([ends[0]], values[inside], [ends[1]]))
    return new_positions, new_values


def ingest_profile(
    positions: Sequence[float],
    values: Sequence[float],
    grid: Grid,
    id: int = 0,
    interpolant: str = "linear",
) -> FunctionalSample:
    """Resample a raw profile onto ``grid``.

    The profile must cover the whole grid interval; anything measured beyond
    it is cut off first.
    """
    positions = np.asarray(positions, dtype=float)
    values = np.asarray(values, dtype=float)
    if positions.ndim != 1 or positions.shape != values.shape:
        raise DataShapeError(
            f"profile {id}: {positions.size} positions but {values.size} values"
        )
    if positions.size < 2:
        raise GridError(f"profile {id}: need at least two points, got {positions.size}")
    if np.any(np.diff(positions) <= 0):
        raise GridError(f"profile {id}: positions are not strictly increasing")
    if positions[0] > grid.lower + _COVER_TOL or positions[-1] < grid.upper - _COVER_TOL:
        raise GridError(
            f"profile {id}: covers [{positions[0]:g}, {positions[-1]:g}], "
            f"grid needs [{grid.lower:g}, {grid.upper:g}]"
        )
    fn = INTERPOLANTS.get(interpolant)
    if fn is None:
        raise GridError(f"unknown interpolant {interpolant!r}; choose from {sorted(INTERPOLANTS)}")
    positions, values = truncate_interval(positions, values, grid.lower, grid.upper)
    return FunctionalSample(fn(positions, values, grid.nodes), id=id)


def common_interval_end(profiles: Sequence[RawProfile]) -> float:
    """Shortest profile length: the largest [0, b] every profile covers."""
    if not profiles:
        raise DataShapeError("no profiles given")
    return min(p.length for p in profiles)


def dataset_from_profiles(
    profiles: Sequence[RawProfile], grid: Grid, interpolant: str = "linear"
) -> Dataset:
    missing = [p.id for p in profiles if p.label is None]
    if missing:
        raise DataShapeError(f"profiles without a label: {missing[:10]}")
    samples = tuple(
        ingest_profile(p.positions, p.values, grid, id=p.id, interpolant=interpolant)
        for p in profiles
    )
    return Dataset(grid, samples, [p.label for p in profiles])


# ── CSV formats ─────────────────────────────────────────────────────────


def _float(text: str, where: str) -> float:
    try:
        return float(text)
    except (TypeError, ValueError):
        raise DataShapeError(f"{where}: {text!r} is not a number") from None


def read_profiles_csv(path: str | Path) -> list[RawProfile]:
    """Read long-format profiles, keeping row order within each id."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = tuple(reader.fieldnames or ())
        if header[:3] != LONG_HEADER:
            raise DataShapeError(f"{path}: expected header starting {','.join(LONG_HEADER)}, got {header}")
        has_label = "label" in header
        points: dict[int, list[tuple[float, float]]] = {}
        labels: dict[int, float] = {}
        for lineno, row in enumerate(reader, start=2):
            where = f"{path}:{lineno}"
            pid = int(_float(row["id"], where))
            points.setdefault(pid, []).append(
                (_float(row["position_mm"], where), _float(row["diameter_mm"], where))
            )
            if has_label and row.get("label") not in (None, ""):
                label = _float(row["label"], where)
                if labels.setdefault(pid, label) != label:
                    raise DataShapeError(f"{where}: profile {pid} has conflicting labels")
    profiles = []
    for pid, pts in points.items():
        arr = np.asarray(pts, dtype=float)
        profiles.append(RawProfile(pid, arr[:, 0], arr[:, 1], labels.get(pid)))
    return profiles


def write_profiles_csv(profiles: Sequence[RawProfile], path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LONG_HEADER + ("label",))
        for p in profiles:
            label = "" if p.label is None else format(p.label, ".17g")
            for t, d in zip(p.positions, p.values):
                writer.writerow([p.id, format(t, ".17g"), format(d, ".17g"), label])


def read_wide_csv(path: str | Path, grid: Grid) -> Dataset:
    """Read pre-gridded samples; the value columns must match ``grid``."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["id", "label"]:
            raise DataShapeError(f"{path}: expected header 'id,label,v_1,...', got {header}")
        n_values = len(header) - 2
        if n_values != grid.size:
            raise GridError(f"{path}: {n_values} value columns but the grid has {grid.size} nodes")
        samples, labels = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            where = f"{path}:{lineno}"
            if len(row) != len(header):
                raise DataShapeError(f"{where}: {len(row)} fields, expected {len(header)}")
            values = [_float(v, where) for v in row[2:]]
            samples.append(FunctionalSample(values, id=int(_float(row[0], where))))
            labels.append(_float(row[1], where))
    if not samples:
        raise DataShapeError(f"{path}: no data rows")
    return Dataset(grid, tuple(samples), labels)


def read_wide_header(path: str | Path) -> list[str]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return next(csv.reader(fh), [])


def write_wide_csv(dataset: Dataset, path: str | Path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "label"] + [f"v_{k + 1}" for k in range(dataset.grid.size)])
        for sample, label in zip(dataset.samples, dataset.responses):
            writer.writerow(
                [sample.id, format(label, ".17g")] + [format(v, ".17g") for v in sample.values]
            )
