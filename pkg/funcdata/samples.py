"""Functional samples tabulated on a grid, and labelled datasets of them."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from errors import DataShapeError, GridError
from funcdata.grid import Grid


@dataclass(frozen=True, eq=False)
class FunctionalSample:
    """One predictor function X_i, stored as its values at the grid nodes."""

    values: np.ndarray
    id: int = 0

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 1:
            raise DataShapeError(f"sample {self.id}: values must be 1-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise DataShapeError(f"sample {self.id}: values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(
        cls, grid: Grid, fn: Callable[[np.ndarray], np.ndarray], id: int = 0
    ) -> FunctionalSample:
        return cls(grid.tabulate(fn), id=id)

    def conforms_to(self, grid: Grid) -> bool:
        return self.values.size == grid.size


@dataclass(frozen=True, eq=False)
class Dataset:
    """Training or test data: N functional inputs with their responses.

    ``responses`` double as class labels in the classification protocol.
    """

    grid: Grid
    samples: tuple[FunctionalSample, ...]
    responses: np.ndarray
    kappa_bound: float | None = field(default=None)

    def __post_init__(self) -> None:
        samples = tuple(self.samples)
        responses = np.array(self.responses, dtype=float).reshape(-1)
        if not samples:
            raise DataShapeError("dataset needs at least one sample")
        if len(samples) != responses.size:
            raise DataShapeError(
                f"{len(samples)} samples but {responses.size} responses"
            )
        if not np.all(np.isfinite(responses)):
            raise DataShapeError("responses must be finite")
        for sample in samples:
            if not sample.conforms_to(self.grid):
                raise GridError(
                    f"sample {sample.id} has {sample.values.size} values, grid has {self.grid.size} nodes"
                )
        if self.kappa_bound is not None:
            from funcdata.inner import l2_norm

            for sample in samples:
                norm = l2_norm(sample, self.grid)
                if norm > self.kappa_bound:
                    raise DataShapeError(
                        f"sample {sample.id} has L2 norm {norm:.6g} > kappa bound {self.kappa_bound:.6g}"
                    )
        responses.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "responses", responses)

    @property
    def n(self) -> int:
        return len(self.samples)

    @property
    def ids(self) -> list[int]:
        return [s.id for s in self.samples]

    def values_matrix(self) -> np.ndarray:
        """N x G matrix of tabulated inputs."""
        return np.vstack([s.values for s in self.samples])

    def head(self, n: int) -> Dataset:
        """The first ``n`` samples (nested-sample protocol)."""
        if not 1 <= n <= self.n:
            raise DataShapeError(f"cannot take {n} of {self.n} samples")
        return Dataset(self.grid, self.samples[:n], self.responses[:n], self.kappa_bound)

    def subset(self, indices: Sequence[int]) -> Dataset:
        indices = [int(i) for i in indices]
        return Dataset(
            self.grid,
            tuple(self.samples[i] for i in indices),
            self.responses[indices],
            self.kappa_bound,
        )
