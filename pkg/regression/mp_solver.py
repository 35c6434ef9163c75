"""Multi-parameter Tikhonov regularization for polynomial functional regression.

The regularized solution of order p is represented through the training
inputs X_1..X_N:

    u_0 = b0,    u_l(s_1..s_l) = sum_i b_{l,i} X_i(s_1)···X_i(s_l),

so fitting reduces to a (pN+1)-dimensional linear system in (b0, b_{l,i})
whose entries are entrywise powers of the Gram matrix c_{i,s}.
Unknowns are ordered [b0; b_{1,1..N}; ...; b_{p,1..N}].
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg as la

from errors import DataShapeError, GridError, IllConditionedWarning, SolverError
from funcdata import Dataset, FunctionalSample, Grid, GramMatrix, cross_gram, gram
from regression.base import LambdaVector, Predictor

logger = logging.getLogger(__name__)

DIRECT_CONDITION_LIMIT = 1e12
RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True, eq=False)
class PolyModel(Predictor):
    """A fitted model u_λ^N held as representer coefficients."""

    order: int
    intercept: float
    coeffs: np.ndarray
    training: Dataset
    gram: GramMatrix
    lambdas: LambdaVector
    residual_norm: float = 0.0
    tolerance: float = float("inf")
    condition: float = 1.0
    method: str = field(default="direct")

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=float).reshape(self.order, self.training.n)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "intercept", float(self.intercept))
        if self.gram.n != self.training.n:
            raise DataShapeError(
                f"Gram matrix is {self.gram.n}x{self.gram.n} but the training set has {self.training.n} samples"
            )

    @property
    def n(self) -> int:
        return self.training.n

    def predict_inner(self, inner: np.ndarray) -> np.ndarray | float:
        """Prediction from inner products <X_i, x>, shape (N,) or (N, M)."""
        inner = np.asarray(inner, dtype=float)
        out = np.full(inner.shape[1:], self.intercept) if inner.ndim > 1 else self.intercept
        for degree in range(1, self.order + 1):
            out = out + self.coeffs[degree - 1] @ inner**degree
        return out

    def predict(self, x: FunctionalSample, grid: Grid | None = None) -> float:
        if not x.conforms_to(self.training.grid):
            raise GridError(
                f"input {x.id} has {x.values.size} values, model grid has {self.training.grid.size} nodes"
            )
        inner = cross_gram(self.training, [x], grid)[:, 0]
        return float(self.predict_inner(inner))

    def predict_many(self, samples: Sequence[FunctionalSample], grid: Grid | None = None) -> np.ndarray:
        for x in samples:
            if not x.conforms_to(self.training.grid):
                raise GridError(f"input {x.id} does not conform to the model grid")
        if not samples:
            return np.empty(0)
        return np.asarray(self.predict_inner(cross_gram(self.training, samples, grid)), dtype=float)

    def fitted_values(self) -> np.ndarray:
        """Predictions on the training inputs, straight from the Gram matrix."""
        out = np.full(self.n, self.intercept)
        for degree in range(1, self.order + 1):
            out = out + self.gram.power(degree) @ self.coeffs[degree - 1]
        return out


def _block(degree: int, n: int) -> slice:
    return slice(1 + (degree - 1) * n, 1 + degree * n)


def assemble_system(
    dataset: Dataset, gram_matrix: GramMatrix, lambdas: LambdaVector, order: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Build the (pN+1)x(pN+1) representer system and its right-hand side.

    Row 0 carries the intercept equation; the N rows of each degree block are
    multiplied through by N, giving
    N·λ_k b_{k,i} + b0 + sum_l sum_s b_{l,s} c_{i,s}^l = Y_i.
    """
    p = lambdas.order
    if order is not None and order != p:
        raise DataShapeError(f"lambda vector has order {p}, requested order {order}")
    n = dataset.n
    if gram_matrix.n != n:
        raise DataShapeError(f"Gram matrix is {gram_matrix.n}x{gram_matrix.n}, dataset has {n} samples")
    y = dataset.responses
    size = p * n + 1
    matrix = np.zeros((size, size))
    rhs = np.empty(size)

    matrix[0, 0] = lambdas[0] + 1.0
    rhs[0] = y.mean()
    powers = [gram_matrix.power(degree) for degree in range(1, p + 1)]
    for degree, power in enumerate(powers, start=1):
        matrix[0, _block(degree, n)] = power.sum(axis=0) / n

    for k in range(1, p + 1):
        rows = _block(k, n)
        matrix[rows, 0] = 1.0
        for degree, power in enumerate(powers, start=1):
            matrix[rows, _block(degree, n)] = power
        matrix[rows, rows] += n * lambdas[k] * np.eye(n)
        rhs[rows] = y
    return matrix, rhs


def solve_system(matrix: np.ndarray, rhs: np.ndarray) -> tuple[np.ndarray, str, float]:
    """LU with partial pivoting, or minimum-norm least squares when ill-conditioned.

    Returns the solution, the path taken and the 2-norm condition estimate.
    """
    if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(rhs))):
        raise SolverError("linear system has non-finite entries")
    condition = float(np.linalg.cond(matrix))
    if np.isfinite(condition) and condition < DIRECT_CONDITION_LIMIT:
        try:
            return la.solve(matrix, rhs), "direct", condition
        except la.LinAlgError as e:
            logger.debug("direct solve failed (%s), falling back to least squares", e)
    warnings.warn(
        f"system condition estimate {condition:.3g} exceeds {DIRECT_CONDITION_LIMIT:.0e}; "
        "using minimum-norm least squares",
        IllConditionedWarning,
        stacklevel=3,
    )
    logger.debug("condition %.3g, solving by least squares", condition)
    solution, *_ = la.lstsq(matrix, rhs, lapack_driver="gelsd")
    if not np.all(np.isfinite(solution)):
        raise SolverError("least-squares solve produced non-finite coefficients")
    return solution, "lstsq", condition


def fit(dataset: Dataset, lambdas: LambdaVector, gram_matrix: GramMatrix | None = None) -> PolyModel:
    """Fit u_λ^N of order ``lambdas.order`` on ``dataset``."""
    if gram_matrix is None:
        gram_matrix = gram(dataset)
    matrix, rhs = assemble_system(dataset, gram_matrix, lambdas)
    solution, method, condition = solve_system(matrix, rhs)
    residual = float(np.linalg.norm(matrix @ solution - rhs))
    tolerance = RESIDUAL_RTOL * (1.0 + float(np.linalg.norm(rhs)))
    if residual > tolerance:
        logger.warning(
            "residual %.3g exceeds tolerance %.3g (%s path, condition %.3g)",
            residual, tolerance, method, condition,
        )
    return PolyModel(
        order=lambdas.order,
        intercept=solution[0],
        coeffs=solution[1:],
        training=dataset,
        gram=gram_matrix,
        lambdas=lambdas,
        residual_norm=residual,
        tolerance=tolerance,
        condition=condition,
        method=method,
    )


def fit_single_parameter(
    dataset: Dataset, lam: float, order: int, gram_matrix: GramMatrix | None = None
) -> PolyModel:
    """Equal-λ fit through the reduced (N+1)-dimensional system.

    With λ0 = ... = λp every degree shares the coefficients β_i, and
    K = sum_l C^l replaces the separate Gram powers.
    """
    lambdas = LambdaVector.uniform(lam, order)
    if order == 0:
        return fit(dataset, lambdas, gram_matrix)
    if gram_matrix is None:
        gram_matrix = gram(dataset)
    n = dataset.n
    kernel = sum(gram_matrix.power(degree) for degree in range(1, order + 1))
    matrix = np.empty((n + 1, n + 1))
    rhs = np.empty(n + 1)
    matrix[0, 0] = lam + 1.0
    matrix[0, 1:] = kernel.sum(axis=0) / n
    rhs[0] = dataset.responses.mean()
    matrix[1:, 0] = 1.0
    matrix[1:, 1:] = kernel + n * lam * np.eye(n)
    rhs[1:] = dataset.responses
    solution, method, condition = solve_system(matrix, rhs)
    residual = float(np.linalg.norm(matrix @ solution - rhs))
    return PolyModel(
        order=order,
        intercept=solution[0],
        coeffs=np.tile(solution[1:], (order, 1)),
        training=dataset,
        gram=gram_matrix,
        lambdas=lambdas,
        residual_norm=residual,
        tolerance=RESIDUAL_RTOL * (1.0 + float(np.linalg.norm(rhs))),
        condition=condition,
        method=f"reduced-{method}",
    )


def fit_grid(
    dataset: Dataset, grid: Sequence[LambdaVector], gram_matrix: GramMatrix | None = None
) -> list[PolyModel]:
    """Fit one model per lambda vector against a shared Gram matrix."""
    if gram_matrix is None:
        gram_matrix = gram(dataset)
    return [fit(dataset, lambdas, gram_matrix) for lambdas in grid]
