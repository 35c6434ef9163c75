"""Flat ``key = value`` run configuration with dotted keys.

Files are parsed with python-dotenv, so ``#`` comments and quoting work as
in ``.env`` files. Command-line overrides are merged on top of file values.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable, Mapping, TypeVar

from dotenv import dotenv_values

from errors import ConfigError
from experiments.stenosis import EvalConfig
from experiments.toy import ToyConfig
from regression import LambdaVector, lambda_grid

logger = logging.getLogger(__name__)

T = TypeVar("T")

KNOWN_KEYS = frozenset(
    {
        "seed",
        "threads",
        "toy.n_max",
        "toy.grid_nodes",
        "toy.noise_sigma",
        "toy.order",
        "toy.lambda_grid",
        "toy.aggregation_holdout",
        "eval.order",
        "eval.lambda_grid",
        "eval.runs",
        "eval.threshold",
        "eval.train_pos",
        "eval.train_neg",
        "eval.grid_nodes",
        "eval.interval_end",
        "eval.interpolant",
        "eval.aggregation_split",
    }
)


def load_config_file(path: str | Path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    values = dotenv_values(path, interpolate=False)
    unknown = sorted(set(values) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    missing = sorted(k for k, v in values.items() if v is None)
    if missing:
        raise ConfigError(f"{path}: keys without a value {missing}")
    return {k: v for k, v in values.items() if v is not None}


def merge(file_values: Mapping[str, str], overrides: Mapping[str, object]) -> dict[str, str]:
    """Overrides win; ``None`` overrides are ignored."""
    merged = dict(file_values)
    for key, value in overrides.items():
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}")
        if value is not None:
            merged[key] = str(value)
    return merged


def _convert(values: Mapping[str, str], key: str, kind: Callable[[str], T], default: T) -> T:
    raw = values.get(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        return kind(raw.strip())
    except ValueError:
        raise ConfigError(f"{key} = {raw!r} is not a valid {kind.__name__}") from None


def parse_lambda_grid(text: str, order: int) -> list[LambdaVector]:
    """``a,b,c`` for every degree, or ``a,b;c;d,e`` per degree."""
    groups = [g for g in text.split(";")]
    try:
        values = [[float(v) for v in g.split(",") if v.strip()] for g in groups]
    except ValueError:
        raise ConfigError(f"malformed lambda grid {text!r}") from None
    if len(values) == 1:
        values = values * (order + 1)
    if len(values) != order + 1:
        raise ConfigError(
            f"lambda grid {text!r} lists {len(values)} degrees, order {order} needs {order + 1}"
        )
    return lambda_grid(values)


def seed_from(values: Mapping[str, str]) -> int:
    return _convert(values, "seed", int, 0)


def threads_from(values: Mapping[str, str], default: Callable[[], int]) -> int:
    """Configured thread count; ``default`` is only consulted when none is set."""
    threads = _convert(values, "threads", int, None)
    if threads is None:
        threads = default()
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    return threads


def toy_config(values: Mapping[str, str]) -> ToyConfig:
    order = _convert(values, "toy.order", int, 2)
    grid_text = values.get("toy.lambda_grid")
    kwargs = {}
    if grid_text:
        kwargs["lambda_grid"] = tuple(parse_lambda_grid(grid_text, order))
    return ToyConfig(
        seed=seed_from(values),
        n_max=_convert(values, "toy.n_max", int, 40),
        grid_nodes=_convert(values, "toy.grid_nodes", int, 256),
        noise_sigma=_convert(values, "toy.noise_sigma", float, 0.0),
        order=order,
        aggregation_holdout=_convert(values, "toy.aggregation_holdout", int, 100),
        **kwargs,
    )


def eval_config(values: Mapping[str, str]) -> EvalConfig:
    order = _convert(values, "eval.order", int, 1)
    grid_text = values.get("eval.lambda_grid")
    interval_end = _convert(values, "eval.interval_end", float, None)
    return EvalConfig(
        seed=seed_from(values),
        order=order,
        lambda_grid=tuple(parse_lambda_grid(grid_text, order)) if grid_text else (),
        runs=_convert(values, "eval.runs", int, 10),
        threshold=_convert(values, "eval.threshold", float, 0.5),
        train_pos=_convert(values, "eval.train_pos", int, 4),
        train_neg=_convert(values, "eval.train_neg", int, 16),
        grid_nodes=_convert(values, "eval.grid_nodes", int, 256),
        interval_end=interval_end,
        interpolant=_convert(values, "eval.interpolant", str, "linear"),
        aggregation_split=_convert(values, "eval.aggregation_split", float, 0.0),
    )
