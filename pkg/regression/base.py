"""Base abstractions for fitted functional models and regularization vectors."""

from __future__ import annotations

import abc
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from errors import ConfigError
from funcdata import FunctionalSample, Grid


@dataclass(frozen=True)
class LambdaVector:
    """One penalty weight per polynomial degree: (λ0, ..., λp)."""

    lambdas: tuple[float, ...]

    def __post_init__(self) -> None:
        lambdas = tuple(float(v) for v in self.lambdas)
        if not lambdas:
            raise ConfigError("a lambda vector needs at least one entry")
        if any(not math.isfinite(v) or v < 0 for v in lambdas):
            raise ConfigError(f"lambdas must be finite and >= 0, got {lambdas}")
        object.__setattr__(self, "lambdas", lambdas)

    @property
    def order(self) -> int:
        return len(self.lambdas) - 1

    @classmethod
    def uniform(cls, value: float, order: int) -> LambdaVector:
        return cls((value,) * (order + 1))

    def scaled(self, factor: float) -> LambdaVector:
        return LambdaVector(tuple(v * factor for v in self.lambdas))

    def label(self) -> str:
        return " ".join(f"l{k}={v:g}" for k, v in enumerate(self.lambdas))

    def __getitem__(self, k: int) -> float:
        return self.lambdas[k]

    def __len__(self) -> int:
        return len(self.lambdas)


def lambda_grid(values_per_degree: Sequence[Sequence[float]]) -> list[LambdaVector]:
    """Cartesian product of per-degree candidates; degree 0 varies slowest."""
    if not values_per_degree or any(len(v) == 0 for v in values_per_degree):
        raise ConfigError("every degree needs at least one lambda value")
    return [LambdaVector(combo) for combo in itertools.product(*values_per_degree)]


class Predictor(abc.ABC):
    """Anything that maps a functional input to a scalar response."""

    order: int

    @abc.abstractmethod
    def predict(self, x: FunctionalSample, grid: Grid | None = None) -> float:
        """Predicted response for one input tabulated on the training grid."""
        ...

    def predict_many(self, samples: Sequence[FunctionalSample], grid: Grid | None = None) -> np.ndarray:
        return np.array([self.predict(x, grid) for x in samples], dtype=float)
