"""Synthetic experiment: reconstruction error against sample size.

Inputs are random cosine polynomials X(t) = sum_{k=0}^{5} ξ_k cos(kt) on
[0, 2π] with ξ_k uniform on [-1, 1]; responses come from the known
degree-2 target of :func:`regression.toy_truth`.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as la

from errors import ConfigError, NumericalBudgetError, PolyfregError
from experiments.runner import run_tasks
from funcdata import Dataset, FunctionalSample, Grid, GramMatrix, build_grid, gram
from regression import (
    LambdaVector,
    TruthMoments,
    TruthPolynomial,
    aggregate,
    apply_truth,
    combined_coefficients,
    fit,
    l2_error,
    l2_error_coefficients,
    lambda_grid,
    toy_truth,
    truth_moments,
)

logger = logging.getLogger(__name__)

N_COSINES = 6
FAILURE_BUDGET = 0.10
AGG = "AGG"
HOLDOUT_STREAM = 1_000_003


def default_lambda_grid(order: int = 2) -> list[LambdaVector]:
    return lambda_grid([[1e-5, 1e-7, 1e-9]] * (order + 1))


@dataclass(frozen=True)
class ToyConfig:
    seed: int = 0
    n_max: int = 40
    lambda_grid: tuple[LambdaVector, ...] = field(default_factory=lambda: tuple(default_lambda_grid()))
    grid_nodes: int = 256
    noise_sigma: float = 0.0
    order: int = 2
    aggregation_holdout: int = 100

    def __post_init__(self) -> None:
        object.__setattr__(self, "lambda_grid", tuple(self.lambda_grid))
        if self.n_max < 1:
            raise ConfigError(f"toy.n_max must be >= 1, got {self.n_max}")
        if not self.lambda_grid:
            raise ConfigError("toy.lambda_grid is empty")
        if not (self.noise_sigma >= 0 and math.isfinite(self.noise_sigma)):
            raise ConfigError(f"toy.noise_sigma must be finite and >= 0, got {self.noise_sigma}")
        if self.grid_nodes < 2:
            raise ConfigError(f"toy.grid_nodes must be >= 2, got {self.grid_nodes}")
        if self.aggregation_holdout < 0:
            raise ConfigError(f"toy.aggregation_holdout must be >= 0, got {self.aggregation_holdout}")
        if self.order != 2:
            raise ConfigError(f"the synthetic target is quadratic; toy.order must be 2, got {self.order}")
        bad = [lam.label() for lam in self.lambda_grid if lam.order != self.order]
        if bad:
            raise ConfigError(f"lambda vectors of the wrong length for order {self.order}: {bad[:3]}")

    def grid(self) -> Grid:
        return build_grid(0.0, 2.0 * math.pi, self.grid_nodes)


def sample_stream(seed: int) -> Callable[[int], np.random.Generator]:
    """Independent generator per sample index."""
    return lambda index: np.random.default_rng([seed, index])


def holdout_stream(seed: int) -> Callable[[int], np.random.Generator]:
    """Generators for the aggregation draw, disjoint from :func:`sample_stream`."""
    return lambda index: np.random.default_rng([seed, HOLDOUT_STREAM, index])


def cosine_input(grid: Grid, xi: Sequence[float], id: int = 0) -> FunctionalSample:
    """X(t) = sum_k ξ_k cos(kt)."""
    xi = np.asarray(xi, dtype=float)
    k = np.arange(xi.size)
    return FunctionalSample(np.cos(np.outer(grid.nodes, k)) @ xi, id=id)


def toy_dataset(
    coefficients: np.ndarray,
    grid: Grid,
    truth: TruthPolynomial | None = None,
    noise: Sequence[float] | None = None,
) -> Dataset:
    """Dataset from explicit cosine coefficients, one row per sample."""
    coefficients = np.atleast_2d(np.asarray(coefficients, dtype=float))
    if truth is None:
        truth = toy_truth(grid)
    samples = tuple(cosine_input(grid, xi, id=i) for i, xi in enumerate(coefficients))
    responses = np.array([apply_truth(truth, x, grid) for x in samples])
    if noise is not None:
        responses = responses + np.asarray(noise, dtype=float)
    return Dataset(grid, samples, responses)


def toy_sample(
    config: ToyConfig,
    n: int,
    rng_stream: Callable[[int], np.random.Generator] | None = None,
    grid: Grid | None = None,
) -> Dataset:
    """The first ``n`` samples of the experiment's draw; sample i depends only on (seed, i)."""
    if n < 1:
        raise ConfigError(f"sample size must be >= 1, got {n}")
    stream = rng_stream or sample_stream(config.seed)
    grid = grid or config.grid()
    xis, noise = np.empty((n, N_COSINES)), np.zeros(n)
    for i in range(n):
        rng = stream(i)
        xis[i] = rng.uniform(-1.0, 1.0, N_COSINES)
        if config.noise_sigma > 0:
            noise[i] = rng.normal(0.0, config.noise_sigma)
    return toy_dataset(xis, grid, noise=noise)


@dataclass(frozen=True)
class ErrorCurveRow:
    n: int
    lambdas: LambdaVector | None
    error: float

    @property
    def is_aggregate(self) -> bool:
        return self.lambdas is None


@dataclass(frozen=True)
class ErrorCurve:
    rows: tuple[ErrorCurveRow, ...]
    failures: int
    order: int = 2

    @property
    def cells(self) -> int:
        return len(self.rows)

    @property
    def failure_rate(self) -> float:
        return self.failures / self.cells if self.cells else 0.0

    def check_budget(self, budget: float = FAILURE_BUDGET) -> None:
        if self.failure_rate > budget:
            raise NumericalBudgetError(
                f"{self.failures} of {self.cells} error-curve cells failed "
                f"({self.failure_rate:.1%} > {budget:.0%})"
            )

    def series(self) -> dict[str, list[tuple[int, float]]]:
        """Per-curve (N, error) points keyed by λ label or ``AGG``."""
        out: dict[str, list[tuple[int, float]]] = {}
        for row in self.rows:
            key = AGG if row.lambdas is None else row.lambdas.label()
            out.setdefault(key, []).append((row.n, row.error))
        return out

    def best_single(self, n: int) -> float:
        errors = [r.error for r in self.rows if r.n == n and r.lambdas is not None]
        finite = [e for e in errors if math.isfinite(e)]
        return min(finite) if finite else float("nan")

    def aggregate_error(self, n: int) -> float:
        return next(r.error for r in self.rows if r.n == n and r.lambdas is None)


@dataclass(frozen=True)
class _CurveTask:
    n: int
    dataset: Dataset
    gram: GramMatrix
    moments: TruthMoments
    truth: TruthPolynomial
    lambdas: tuple[LambdaVector, ...]
    holdout: Dataset | None = None


def _curve_cells(task: _CurveTask) -> tuple[list[ErrorCurveRow], int]:
    train = task.dataset.head(task.n)
    gram_n = task.gram.leading(task.n)
    moments = task.moments.leading(task.n)
    rows, models, failures = [], [], 0
    for lambdas in task.lambdas:
        try:
            model = fit(train, lambdas, gram_n)
            error = l2_error(model, task.truth, gram_n, moments)
            models.append(model)
        except (PolyfregError, la.LinAlgError, FloatingPointError) as e:
            logger.warning("N=%d %s failed: %s", task.n, lambdas.label(), e)
            error = float("nan")
            failures += 1
        rows.append(ErrorCurveRow(task.n, lambdas, error))
    try:
        if not models:
            raise PolyfregError("no base model to aggregate")
        agg = aggregate(models, train, holdout=task.holdout)
        intercept, coeffs = combined_coefficients(agg)
        error = l2_error_coefficients(intercept, coeffs, train, gram_n, task.truth, moments)
    except (PolyfregError, la.LinAlgError, FloatingPointError) as e:
        logger.warning("N=%d aggregate failed: %s", task.n, e)
        error = float("nan")
        failures += 1
    rows.append(ErrorCurveRow(task.n, None, error))
    return rows, failures


def error_curve(config: ToyConfig, threads: int = 1) -> ErrorCurve:
    """Errors of every λ model and of their aggregate for N = 1..n_max.

    The data for size N are the first N samples of one size-n_max draw. The
    aggregation weights are fitted on a separate draw of
    ``aggregation_holdout`` samples, or on the training samples when it is 0.
    """
    dataset = toy_sample(config, config.n_max)
    holdout = None
    if config.aggregation_holdout:
        holdout = toy_sample(
            config, config.aggregation_holdout, holdout_stream(config.seed), dataset.grid
        )
    truth = toy_truth(dataset.grid)
    full_gram = gram(dataset)
    moments = truth_moments(truth, dataset)
    tasks = [
        _CurveTask(n, dataset, full_gram, moments, truth, config.lambda_grid, holdout)
        for n in range(1, config.n_max + 1)
    ]
    results = run_tasks(_curve_cells, tasks, threads)
    rows = [row for cells, _ in results for row in cells]
    failures = sum(f for _, f in results)
    logger.info(
        "error curve: N=1..%d, %d models per N, %d failed cells",
        config.n_max, len(config.lambda_grid), failures,
    )
    return ErrorCurve(tuple(rows), failures, config.order)


def write_error_curve_csv(curve: ErrorCurve, path: str | Path) -> Path:
    """``N,lambda0,...,lambdap,error``; the aggregate carries ``AGG`` in the λ columns."""
    path = Path(path)
    columns = [f"lambda{k}" for k in range(curve.order + 1)]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["N", *columns, "error"])
        for row in curve.rows:
            if row.lambdas is None:
                lambdas = [AGG] * len(columns)
            else:
                lambdas = [format(v, ".17g") for v in row.lambdas.lambdas]
            writer.writerow([row.n, *lambdas, format(row.error, ".17g")])
    return path
