"""Model persistence: coefficient CSV, JSON sidecar and the training inputs.

Predictions need the training inputs, so they are written next to the
coefficients in the wide CSV format. Floats use 17 significant digits and
round-trip exactly.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from errors import DataShapeError
from funcdata import gram, grid_from_spec, read_wide_csv, write_wide_csv
from regression.base import LambdaVector
from regression.mp_solver import PolyModel

logger = logging.getLogger(__name__)

MODEL_CSV = "model.csv"
MODEL_JSON = "model.json"
TRAINING_CSV = "training.csv"
FORMAT_VERSION = 1


def save_model(model: PolyModel, out_dir: str | Path) -> Path:
    """Write ``model.csv``, ``model.json`` and ``training.csv``; returns the JSON path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with (out_dir / MODEL_CSV).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kind", "degree", "index", "value"])
        writer.writerow(["intercept", 0, 0, format(model.intercept, ".17g")])
        for degree in range(1, model.order + 1):
            for index, value in enumerate(model.coeffs[degree - 1]):
                writer.writerow(["coeff", degree, index, format(value, ".17g")])
    write_wide_csv(model.training, out_dir / TRAINING_CSV)
    meta = {
        "format": FORMAT_VERSION,
        "order": model.order,
        "lambdas": list(model.lambdas.lambdas),
        "n": model.n,
        "grid": model.training.grid.spec,
        "residual_norm": model.residual_norm,
        "condition": model.condition if np.isfinite(model.condition) else None,
        "method": model.method,
        "training_file": TRAINING_CSV,
    }
    path = out_dir / MODEL_JSON
    path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    logger.info("model saved to %s", out_dir)
    return path


def load_model(path: str | Path) -> PolyModel:
    """Read a model written by :func:`save_model` (path of ``model.json`` or its directory)."""
    path = Path(path)
    if path.is_dir():
        path = path / MODEL_JSON
    try:
        meta = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataShapeError(f"{path}: not a model sidecar ({e})") from e
    order, n = int(meta["order"]), int(meta["n"])
    grid = grid_from_spec(meta["grid"])
    training = read_wide_csv(path.parent / meta.get("training_file", TRAINING_CSV), grid)
    if training.n != n:
        raise DataShapeError(f"{path}: sidecar says {n} training samples, file has {training.n}")

    intercept = None
    coeffs = np.full((order, n), np.nan)
    with (path.parent / MODEL_CSV).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if row["kind"] == "intercept":
                intercept = float(row["value"])
            elif row["kind"] == "coeff":
                degree, index = int(row["degree"]), int(row["index"])
                if not (1 <= degree <= order and 0 <= index < n):
                    raise DataShapeError(f"{path.parent / MODEL_CSV}: coefficient ({degree}, {index}) out of range")
                coeffs[degree - 1, index] = float(row["value"])
    if intercept is None or np.isnan(coeffs).any():
        raise DataShapeError(f"{path.parent / MODEL_CSV}: incomplete coefficient table")
    condition = meta.get("condition")
    return PolyModel(
        order=order,
        intercept=intercept,
        coeffs=coeffs,
        training=training,
        gram=gram(training),
        lambdas=LambdaVector(tuple(meta["lambdas"])),
        residual_norm=float(meta.get("residual_norm", 0.0)),
        condition=float("inf") if condition is None else float(condition),
        method=meta.get("method", "direct"),
    )
