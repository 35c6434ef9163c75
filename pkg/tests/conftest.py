"""Shared fixtures for the polyfreg test suite."""

from __future__ import annotations

import math

import numpy as np
import pytest

from experiments.toy import ToyConfig, toy_sample
from funcdata import Dataset, FunctionalSample, Grid, build_grid
from regression import TruthPolynomial, toy_truth


# ── Grids ───────────────────────────────────────────────────────────────


@pytest.fixture
def period_grid() -> Grid:
    """[0, 2π] with 256 trapezoid nodes; exact for low-order trigonometric products."""
    return build_grid(0.0, 2.0 * math.pi, 256)


@pytest.fixture
def unit_grid() -> Grid:
    return build_grid(0.0, 1.0, 128)


# ── Data ────────────────────────────────────────────────────────────────


def random_inputs(grid: Grid, n: int, rng: np.random.Generator, scale: float = 1.0) -> list[FunctionalSample]:
    """Smooth random functions: a few random sines and cosines."""
    t = (grid.nodes - grid.lower) / (grid.upper - grid.lower)
    samples = []
    for i in range(n):
        a = rng.uniform(-1.0, 1.0, 4)
        values = a[0] + a[1] * np.sin(np.pi * t) + a[2] * np.cos(2 * np.pi * t) + a[3] * t**2
        samples.append(FunctionalSample(scale * values, id=i))
    return samples


def random_dataset(grid: Grid, n: int, seed: int, scale: float = 1.0) -> Dataset:
    rng = np.random.default_rng(seed)
    samples = random_inputs(grid, n, rng, scale)
    return Dataset(grid, tuple(samples), rng.normal(0.0, 1.0, n))


@pytest.fixture
def small_dataset(unit_grid: Grid) -> Dataset:
    return random_dataset(unit_grid, 4, seed=11)


@pytest.fixture
def truth(period_grid: Grid) -> TruthPolynomial:
    return toy_truth(period_grid)


@pytest.fixture
def toy_data(period_grid: Grid) -> Dataset:
    """Twelve noiseless samples of the synthetic experiment."""
    return toy_sample(ToyConfig(seed=3), 12, grid=period_grid)
