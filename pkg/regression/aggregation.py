"""Aggregation of fitted models by the linear functional strategy.

Given models u_1..u_R, the aggregate ũ = sum_r c̃_r u_r takes c̃ from the
empirical normal equations G̃ c̃ = g̃ over their prediction vectors.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import scipy.linalg as la

from errors import DataShapeError, GridError, SolverError
from funcdata import Dataset, FunctionalSample, Grid
from regression.base import Predictor
from regression.model_eval import empirical_risk
from regression.mp_solver import PolyModel

logger = logging.getLogger(__name__)

PLAIN_CONDITION_LIMIT = 1e10
RIDGE_SCALE = 1e-10


@dataclass(frozen=True, eq=False)
class AggregatedModel(Predictor):
    base_models: tuple[PolyModel, ...]
    coefficients: np.ndarray
    gram_tilde_condition: float = 1.0
    ridge_used: float = 0.0
    holdout: bool = False

    def __post_init__(self) -> None:
        models = tuple(self.base_models)
        coefficients = np.array(self.coefficients, dtype=float).ravel()
        if not models:
            raise DataShapeError("an aggregate needs at least one base model")
        if coefficients.size != len(models):
            raise DataShapeError(f"{coefficients.size} coefficients for {len(models)} models")
        if not np.all(np.isfinite(coefficients)):
            raise SolverError("aggregation coefficients are not finite")
        coefficients.setflags(write=False)
        object.__setattr__(self, "base_models", models)
        object.__setattr__(self, "coefficients", coefficients)

    @property
    def order(self) -> int:
        return max(m.order for m in self.base_models)

    @property
    def r(self) -> int:
        return len(self.base_models)

    def predict(self, x: FunctionalSample, grid: Grid | None = None) -> float:
        return float(self.predict_many([x], grid)[0])

    def predict_many(self, samples: Sequence[FunctionalSample], grid: Grid | None = None) -> np.ndarray:
        if not samples:
            return np.empty(0)
        return self.coefficients @ prediction_matrix(self.base_models, samples, grid)


def prediction_matrix(
    models: Sequence[PolyModel], samples: Sequence[FunctionalSample], grid: Grid | None = None
) -> np.ndarray:
    """R x M matrix of base predictions."""
    return np.vstack([m.predict_many(samples, grid) for m in models])


def _base_predictions(models: Sequence[PolyModel], data: Dataset) -> np.ndarray:
    rows = []
    for m in models:
        if not m.training.grid.compatible(data.grid):
            raise GridError("base model grid does not match the aggregation data")
        rows.append(m.fitted_values() if m.training is data else m.predict_many(data.samples, data.grid))
    return np.vstack(rows)


def build_gram_tilde(base_predictions: np.ndarray) -> np.ndarray:
    """G̃ = P Pᵀ / N for the R x N prediction matrix P."""
    p = np.atleast_2d(np.asarray(base_predictions, dtype=float))
    if p.shape[0] == 0:
        raise DataShapeError("no base models to aggregate")
    if p.shape[1] == 0:
        raise DataShapeError("no samples to aggregate on")
    g = p @ p.T / p.shape[1]
    return (g + g.T) / 2.0


def build_g_tilde(base_predictions: np.ndarray, responses: Sequence[float]) -> np.ndarray:
    p = np.atleast_2d(np.asarray(base_predictions, dtype=float))
    y = np.asarray(responses, dtype=float).ravel()
    if p.shape[1] != y.size:
        raise DataShapeError(f"predictions cover {p.shape[1]} samples, {y.size} responses given")
    return p @ y / y.size


def solve_aggregation(gram_tilde: np.ndarray, g_tilde: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Solve G̃ c̃ = g̃; returns (c̃, condition, ridge)."""
    if not np.any(gram_tilde):
        raise SolverError("degenerate aggregation: every base model predicts 0")
    r = gram_tilde.shape[0]
    condition = float(np.linalg.cond(gram_tilde))
    if np.isfinite(condition) and condition < PLAIN_CONDITION_LIMIT:
        try:
            return la.solve(gram_tilde, g_tilde, assume_a="sym"), condition, 0.0
        except la.LinAlgError:
            pass
    ridge = RIDGE_SCALE * float(np.trace(gram_tilde)) / r
    logger.info("G~ condition %.3g, solving with ridge %.3g", condition, ridge)
    try:
        c = la.solve(gram_tilde + ridge * np.eye(r), g_tilde, assume_a="pos")
    except la.LinAlgError as e:
        raise SolverError(f"ridge-stabilised aggregation failed: {e}") from e
    return c, condition, ridge


def aggregate(
    models: Sequence[PolyModel], dataset: Dataset, holdout: Dataset | None = None
) -> AggregatedModel:
    """Aggregate ``models``; G̃ and g̃ come from ``holdout`` when given."""
    models = tuple(models)
    if not models:
        raise DataShapeError("no base models to aggregate")
    data = holdout if holdout is not None else dataset
    predictions = _base_predictions(models, data)
    coefficients, condition, ridge = solve_aggregation(
        build_gram_tilde(predictions), build_g_tilde(predictions, data.responses)
    )
    return AggregatedModel(models, coefficients, condition, ridge, holdout is not None)


def predict_aggregated(agg: AggregatedModel, x: FunctionalSample, grid: Grid | None = None) -> float:
    return agg.predict(x, grid)


def combined_coefficients(agg: AggregatedModel) -> tuple[float, np.ndarray]:
    """Representer coefficients (b0, b) of ũ when all bases share training inputs."""
    first = agg.base_models[0]
    for m in agg.base_models[1:]:
        if m.order != first.order:
            raise DataShapeError("base models have different orders")
        if m.training is not first.training and not (
            m.n == first.n and np.array_equal(m.training.values_matrix(), first.training.values_matrix())
        ):
            raise DataShapeError("base models were fitted on different training sets")
    intercept = float(sum(c * m.intercept for c, m in zip(agg.coefficients, agg.base_models)))
    coeffs = sum(c * m.coeffs for c, m in zip(agg.coefficients, agg.base_models))
    return intercept, np.asarray(coeffs)


def write_report(agg: AggregatedModel, dataset: Dataset, out_dir: str | Path) -> tuple[Path, Path]:
    """Write ``aggregation.csv`` and ``aggregation_diagnostics.json``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    order = max(len(m.lambdas) for m in agg.base_models) - 1
    lambda_cols = [f"lambda{k}" for k in range(order + 1)]
    csv_path = out_dir / "aggregation.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model_index", *lambda_cols, "c_tilde", "train_risk"])
        for index, (c, m) in enumerate(zip(agg.coefficients, agg.base_models)):
            lambdas = [format(v, ".17g") for v in m.lambdas.lambdas]
            lambdas += [""] * (len(lambda_cols) - len(lambdas))
            risk = empirical_risk(m.predict_many(dataset.samples), dataset.responses)
            writer.writerow([index, *lambdas, format(c, ".17g"), format(risk, ".17g")])
        risk = empirical_risk(agg.predict_many(dataset.samples), dataset.responses)
        writer.writerow(["AGG", *["AGG"] * len(lambda_cols), "", format(risk, ".17g")])

    json_path = out_dir / "aggregation_diagnostics.json"
    condition = agg.gram_tilde_condition
    json_path.write_text(
        json.dumps(
            {
                "models": agg.r,
                "samples": dataset.n,
                "gram_tilde_condition": condition if np.isfinite(condition) else None,
                "ridge_used": agg.ridge_used,
                "holdout": agg.holdout,
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return csv_path, json_path
