"""Stenosis classification protocol on diameter profiles.

Each vessel is a diameter-versus-centreline-position profile with a
severity label in {0, 0.25, 0.5, 0.75, 1.0}. Regression models are fitted
on a stratified training split, scored on the rest and thresholded.

The surrogate generator produces synthetic vessels for exercising the
pipeline. They are not clinical data.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from errors import ConfigError, DataShapeError
from experiments.metrics import BinaryMetrics, binary_metrics
from experiments.runner import run_tasks
from funcdata import INTERPOLANTS, Dataset, Grid, RawProfile, dataset_from_profiles, gram
from regression import LambdaVector, aggregate, fit, lambda_grid

logger = logging.getLogger(__name__)

SEVERITY_LEVELS = (0.25, 0.5, 0.75, 1.0)
INTERVAL_END_MM = 140.0
AGG = "AGG"


def default_lambda_grid(order: int = 1) -> list[LambdaVector]:
    return lambda_grid([[1e-2, 1e-1, 1.0]] * (order + 1))


# ── Surrogate vessels ───────────────────────────────────────────────────


def _surrogate_profile(
    id: int, label: float, rng: np.random.Generator, interval_end: float
) -> RawProfile:
    length = interval_end + rng.uniform(0.0, 60.0)
    step = rng.uniform(0.4, 0.6)
    positions = np.append(np.arange(0.0, length, step), length)
    t = positions / length

    base = rng.uniform(4.5, 5.5) - rng.uniform(0.8, 1.6) * t
    for _ in range(3):
        base += rng.uniform(0.02, 0.12) * np.sin(2 * np.pi * rng.uniform(0.5, 3.0) * t + rng.uniform(0, 2 * np.pi))
    if label > 0:
        centre = rng.uniform(0.15, 0.85) * interval_end
        width = rng.uniform(3.0, 8.0)
        depth = 0.15 + 0.6 * label
        base *= 1.0 - depth * np.exp(-0.5 * ((positions - centre) / width) ** 2)
    return RawProfile(id, positions, base, label)


def surrogate_profiles(
    n_pos: int, n_neg: int, rng: np.random.Generator, interval_end: float = INTERVAL_END_MM
) -> list[RawProfile]:
    """Vessels of ragged length >= ``interval_end``; positives get a Gaussian narrowing."""
    if n_pos < 0 or n_neg < 0 or n_pos + n_neg == 0:
        raise ConfigError(f"need a positive vessel count, got {n_pos} positive / {n_neg} negative")
    labels = [float(rng.choice(SEVERITY_LEVELS)) for _ in range(n_pos)] + [0.0] * n_neg
    labels = [labels[i] for i in rng.permutation(len(labels))]
    return [_surrogate_profile(i, label, rng, interval_end) for i, label in enumerate(labels)]


def surrogate_stenosis_dataset(
    n_pos: int,
    n_neg: int,
    rng: np.random.Generator,
    grid: Grid,
    interpolant: str = "linear",
) -> Dataset:
    profiles = surrogate_profiles(n_pos, n_neg, rng, grid.upper)
    return dataset_from_profiles(profiles, grid, interpolant)


# ── Protocol ────────────────────────────────────────────────────────────


def stratified_split(
    dataset: Dataset, train_pos: int, train_neg: int, rng: np.random.Generator
) -> tuple[Dataset, Dataset]:
    """Draw ``train_pos`` positives and ``train_neg`` negatives; the rest is test."""
    positive = dataset.responses > 0
    pos, neg = np.flatnonzero(positive), np.flatnonzero(~positive)
    if train_pos < 0 or train_neg < 0:
        raise ConfigError("stratum sizes must be >= 0")
    if pos.size < train_pos or neg.size < train_neg:
        raise DataShapeError(
            f"insufficient strata: need {train_pos} positive / {train_neg} negative, "
            f"have {pos.size} / {neg.size}"
        )
    chosen = np.concatenate(
        (rng.choice(pos, train_pos, replace=False), rng.choice(neg, train_neg, replace=False))
    ).astype(int)
    train_idx = np.sort(chosen)
    test_idx = np.setdiff1d(np.arange(dataset.n), train_idx)
    if train_idx.size == 0 or test_idx.size == 0:
        raise DataShapeError(
            f"split leaves {train_idx.size} training and {test_idx.size} test samples"
        )
    return dataset.subset(train_idx), dataset.subset(test_idx)


@dataclass(frozen=True)
class ClassifyResult:
    models: tuple[BinaryMetrics, ...]
    aggregated: BinaryMetrics
    coefficients: np.ndarray = field(compare=False, default=None)


def classify_eval(
    train: Dataset,
    test: Dataset,
    lambdas: Sequence[LambdaVector],
    order: int,
    threshold: float = 0.5,
    holdout: Dataset | None = None,
) -> ClassifyResult:
    """Fit one model per λ, aggregate them and score ``test``."""
    bad = [lam.label() for lam in lambdas if lam.order != order]
    if bad:
        raise ConfigError(f"lambda vectors of the wrong length for order {order}: {bad[:3]}")
    gram_matrix = gram(train)
    models = [fit(train, lam, gram_matrix) for lam in lambdas]
    agg = aggregate(models, train, holdout)
    scores = np.vstack([m.predict_many(test.samples) for m in models])
    per_model = tuple(binary_metrics(s, test.responses, threshold) for s in scores)
    combined = binary_metrics(agg.coefficients @ scores, test.responses, threshold)
    return ClassifyResult(per_model, combined, agg.coefficients)


@dataclass(frozen=True)
class EvalConfig:
    seed: int = 0
    order: int = 1
    lambda_grid: tuple[LambdaVector, ...] = ()
    runs: int = 10
    threshold: float = 0.5
    train_pos: int = 4
    train_neg: int = 16
    grid_nodes: int = 256
    interval_end: float | None = None
    interpolant: str = "linear"
    aggregation_split: float = 0.0

    def __post_init__(self) -> None:
        if self.order < 0:
            raise ConfigError(f"eval.order must be >= 0, got {self.order}")
        if not self.lambda_grid:
            object.__setattr__(self, "lambda_grid", tuple(default_lambda_grid(self.order)))
        object.__setattr__(self, "lambda_grid", tuple(self.lambda_grid))
        if self.runs < 1:
            raise ConfigError(f"eval.runs must be >= 1, got {self.runs}")
        if not math.isfinite(self.threshold):
            raise ConfigError("eval.threshold must be finite")
        if not 0.0 <= self.aggregation_split < 1.0:
            raise ConfigError(f"eval.aggregation_split must lie in [0, 1), got {self.aggregation_split}")
        if self.interpolant not in INTERPOLANTS:
            raise ConfigError(f"eval.interpolant must be one of {sorted(INTERPOLANTS)}, got {self.interpolant!r}")
        if self.grid_nodes < 2:
            raise ConfigError(f"eval.grid_nodes must be >= 2, got {self.grid_nodes}")
        if self.interval_end is not None and not self.interval_end > 0:
            raise ConfigError(f"eval.interval_end must be > 0, got {self.interval_end}")
        bad = [lam.label() for lam in self.lambda_grid if lam.order != self.order]
        if bad:
            raise ConfigError(f"lambda vectors of the wrong length for order {self.order}: {bad[:3]}")

    @property
    def family(self) -> str:
        return {1: "linear", 2: "quadratic"}.get(self.order, f"order{self.order}")


def _holdout_split(
    train: Dataset, fraction: float, rng: np.random.Generator
) -> tuple[Dataset, Dataset | None]:
    if fraction <= 0:
        return train, None
    n_hold = max(1, round(fraction * train.n))
    if n_hold >= train.n:
        raise DataShapeError(f"aggregation split leaves no training samples out of {train.n}")
    order = rng.permutation(train.n)
    return train.subset(np.sort(order[n_hold:])), train.subset(np.sort(order[:n_hold]))


@dataclass(frozen=True)
class _RunTask:
    index: int
    dataset: Dataset
    config: EvalConfig


def _one_run(task: _RunTask) -> ClassifyResult:
    cfg = task.config
    rng = np.random.default_rng([cfg.seed, task.index])
    train, test = stratified_split(task.dataset, cfg.train_pos, cfg.train_neg, rng)
    train, holdout = _holdout_split(train, cfg.aggregation_split, rng)
    return classify_eval(train, test, cfg.lambda_grid, cfg.order, cfg.threshold, holdout)


@dataclass(frozen=True)
class MetricRow:
    model: str
    lambdas: LambdaVector | None
    se: float
    sp: float
    auc: float
    undefined: int = 0


def _mean(values: list[float | None]) -> tuple[float, int]:
    defined = [v for v in values if v is not None]
    return (float(np.mean(defined)) if defined else float("nan")), len(values) - len(defined)


def _summarise(name: str, lambdas: LambdaVector | None, metrics: list[BinaryMetrics]) -> MetricRow:
    se, u_se = _mean([m.sensitivity for m in metrics])
    sp, u_sp = _mean([m.specificity for m in metrics])
    auc, u_auc = _mean([m.auc for m in metrics])
    return MetricRow(name, lambdas, se, sp, auc, max(u_se, u_sp, u_auc))


@dataclass(frozen=True)
class EvalSummary:
    rows: tuple[MetricRow, ...]
    runs: tuple[ClassifyResult, ...]
    family: str


def evaluate_runs(dataset: Dataset, config: EvalConfig, threads: int = 1) -> EvalSummary:
    """Repeat split, fit and score ``config.runs`` times; average SE, SP and AUC."""
    tasks = [_RunTask(i, dataset, config) for i in range(config.runs)]
    results = run_tasks(_one_run, tasks, threads)
    rows = [
        _summarise(str(k), lam, [r.models[k] for r in results])
        for k, lam in enumerate(config.lambda_grid)
    ]
    rows.append(_summarise(AGG, None, [r.aggregated for r in results]))
    undefined = sum(r.undefined for r in rows)
    if undefined:
        logger.warning("%d undefined metric values excluded from the averages", undefined)
    logger.info("%s family: %d models + AGG over %d runs", config.family, len(config.lambda_grid), config.runs)
    return EvalSummary(tuple(rows), tuple(results), config.family)


def write_metrics_csv(summary: EvalSummary, path: str | Path) -> Path:
    """``model,SE,SP,AUC`` with λ values as the model name of single models."""
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["model", "SE", "SP", "AUC"])
        for row in summary.rows:
            name = AGG if row.lambdas is None else ";".join(format(v, "g") for v in row.lambdas.lambdas)
            writer.writerow([name, format(row.se, ".6f"), format(row.sp, ".6f"), format(row.auc, ".6f")])
    return path
