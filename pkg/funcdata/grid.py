"""Quadrature grids discretising the domain interval and its measure."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import roots_legendre

from errors import GridError


def _trapezoid(lower: float, upper: float, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform nodes, composite trapezoid weights (half weight at both ends)."""
    nodes = np.linspace(lower, upper, n_nodes)
    h = (upper - lower) / (n_nodes - 1)
    weights = np.full(n_nodes, h)
    weights[0] = weights[-1] = 0.5 * h
    return nodes, weights


def _gauss_legendre(lower: float, upper: float, n_nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Legendre roots mapped from [-1, 1] onto [lower, upper]."""
    x, w = roots_legendre(n_nodes)
    half = 0.5 * (upper - lower)
    return lower + half * (x + 1.0), half * w


QUADRATURE_RULES: dict[str, Callable[[float, float, int], tuple[np.ndarray, np.ndarray]]] = {
    "trapezoid": _trapezoid,
    "gauss-legendre": _gauss_legendre,
}


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature nodes and weights representing the interval [lower, upper].

    Nodes and weights are stored read-only; a Grid never changes after
    construction.
    """

    lower: float
    upper: float
    nodes: np.ndarray
    weights: np.ndarray
    rule: str = field(default="trapezoid")

    def __post_init__(self) -> None:
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if not self.upper > self.lower:
            raise GridError(f"invalid interval: upper {self.upper} <= lower {self.lower}")
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise GridError(
                f"nodes and weights must be 1-D of equal length, got {nodes.shape} and {weights.shape}"
            )
        if nodes.size < 2:
            raise GridError(f"too few nodes: {nodes.size} < 2")
        if np.any(np.diff(nodes) <= 0):
            raise GridError("grid nodes must be strictly increasing")
        if nodes[0] < self.lower or nodes[-1] > self.upper:
            raise GridError(f"grid nodes leave [{self.lower}, {self.upper}]")
        if np.any(weights <= 0):
            raise GridError("quadrature weights must be positive")
        length = self.upper - self.lower
        if abs(weights.sum() - length) > 1e-10 * length:
            raise GridError(f"weights sum to {weights.sum()!r}, expected {length!r}")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return int(self.nodes.size)

    @property
    def spec(self) -> dict:
        """JSON-friendly description sufficient to rebuild the grid."""
        return {
            "lower": self.lower,
            "upper": self.upper,
            "n_nodes": self.size,
            "rule": self.rule,
        }

    def compatible(self, other: Grid) -> bool:
        if self is other:
            return True
        return (
            self.size == other.size
            and bool(np.array_equal(self.nodes, other.nodes))
            and bool(np.array_equal(self.weights, other.weights))
        )

    def tabulate(self, fn: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Evaluate a vectorised function at the nodes."""
        values = np.broadcast_to(np.asarray(fn(self.nodes), dtype=float), self.nodes.shape)
        return np.array(values)


def build_grid(lower: float, upper: float, n_nodes: int, rule: str = "trapezoid") -> Grid:
    """Discretise [lower, upper] with ``n_nodes`` nodes of the given rule."""
    if not upper > lower:
        raise GridError(f"invalid interval: upper {upper} <= lower {lower}")
    if int(n_nodes) < 2:
        raise GridError(f"too few nodes: {n_nodes} < 2")
    make = QUADRATURE_RULES.get(rule)
    if make is None:
        raise GridError(f"unknown quadrature rule {rule!r}; choose from {sorted(QUADRATURE_RULES)}")
    nodes, weights = make(float(lower), float(upper), int(n_nodes))
    return Grid(float(lower), float(upper), nodes, weights, rule=rule)


def grid_from_spec(spec: dict) -> Grid:
    return build_grid(spec["lower"], spec["upper"], spec["n_nodes"], spec.get("rule", "trapezoid"))
