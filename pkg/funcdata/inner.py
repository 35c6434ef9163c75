"""L2 inner products on a quadrature grid and the Gram matrices built from them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from errors import DataShapeError, GridError
from funcdata.grid import Grid

if TYPE_CHECKING:
    from funcdata.samples import Dataset, FunctionalSample


def inner_product(f: FunctionalSample, g: FunctionalSample, grid: Grid) -> float:
    """Quadrature of f·g: sum_k w_k f_k g_k.

    The pointwise product is formed first so the result is exactly
    symmetric in (f, g).
    """
    if f.values.size != grid.size or g.values.size != grid.size:
        raise GridError(
            f"length mismatch: {f.values.size} and {g.values.size} values on a {grid.size}-node grid"
        )
    return float(np.dot(grid.weights, f.values * g.values))


def l2_norm(f: FunctionalSample, grid: Grid) -> float:
    return float(np.sqrt(inner_product(f, f, grid)))


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Pairwise inner products c_{i,s} of a dataset's inputs."""

    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DataShapeError(f"Gram matrix must be square, got shape {entries.shape}")
        if not np.allclose(entries, entries.T, rtol=0.0, atol=1e-12):
            raise DataShapeError("Gram matrix is not symmetric")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    def power(self, degree: int) -> np.ndarray:
        """Entrywise power (c_{i,s})^degree."""
        return self.entries**degree

    def leading(self, n: int) -> GramMatrix:
        """Gram matrix of the first ``n`` samples."""
        if not 1 <= n <= self.n:
            raise DataShapeError(f"cannot take a {n}x{n} block of a {self.n}x{self.n} Gram matrix")
        return GramMatrix(self.entries[:n, :n])

    def min_eigenvalue(self) -> float:
        """Diagnostic only; PSD up to round-off."""
        return float(np.linalg.eigvalsh(self.entries)[0])


def gram(dataset: Dataset) -> GramMatrix:
    """c_{i,s} = <X_i, X_s>, computed pairwise with :func:`inner_product`."""
    n = dataset.n
    entries = np.empty((n, n))
    for i, xi in enumerate(dataset.samples):
        for s in range(i, n):
            entries[i, s] = entries[s, i] = inner_product(xi, dataset.samples[s], dataset.grid)
    return GramMatrix(entries)


def cross_gram(
    train: Dataset, samples: Sequence[FunctionalSample], grid: Grid | None = None
) -> np.ndarray:
    """N_train x M matrix of <X_i, x_m> for new inputs x_m."""
    if grid is not None and not grid.compatible(train.grid):
        raise GridError("new inputs live on a different grid than the training data")
    out = np.empty((train.n, len(samples)))
    for m, x in enumerate(samples):
        for i, xi in enumerate(train.samples):
            out[i, m] = inner_product(xi, x, train.grid)
    return out
