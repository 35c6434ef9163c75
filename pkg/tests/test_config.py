"""Tests for config files, overrides and lambda-grid parsing."""

from __future__ import annotations

import pytest

from errors import ConfigError
from experiments.config import (
    eval_config,
    load_config_file,
    merge,
    parse_lambda_grid,
    threads_from,
    toy_config,
)


class TestLambdaGrid:
    """Verify lambda grid parsing per degree."""

    def test_broadcast(self) -> None:
        grid = parse_lambda_grid("1e-5,1e-7,1e-9", order=2)
        assert len(grid) == 27
        assert grid[0].lambdas == (1e-5, 1e-5, 1e-5)

    def test_per_degree(self) -> None:
        grid = parse_lambda_grid("1;2,3", order=1)
        assert [g.lambdas for g in grid] == [(1.0, 2.0), (1.0, 3.0)]

    def test_wrong_degree_count(self) -> None:
        with pytest.raises(ConfigError, match="needs 3"):
            parse_lambda_grid("1;2", order=2)

    def test_malformed(self) -> None:
        with pytest.raises(ConfigError, match="malformed"):
            parse_lambda_grid("1,x", order=1)


class TestConfigFile:
    """Tests for key = value config files and overrides."""

    def test_load(self, tmp_path) -> None:
        path = tmp_path / "run.conf"
        path.write_text("# toy run\nseed = 7\ntoy.noise_sigma = 0.1  # small\ntoy.lambda_grid = 1e-5,1e-7\n")
        values = load_config_file(path)
        assert values == {"seed": "7", "toy.noise_sigma": "0.1", "toy.lambda_grid": "1e-5,1e-7"}

    def test_unknown_key(self, tmp_path) -> None:
        path = tmp_path / "run.conf"
        path.write_text("toy.nmax = 4\n")
        with pytest.raises(ConfigError, match="unknown keys"):
            load_config_file(path)

    def test_missing_file(self, tmp_path) -> None:
        with pytest.raises(ConfigError, match="not found"):
            load_config_file(tmp_path / "absent.conf")

    def test_overrides_win(self) -> None:
        merged = merge({"seed": "1", "toy.n_max": "5"}, {"seed": 9, "toy.n_max": None})
        assert merged == {"seed": "9", "toy.n_max": "5"}

    def test_unknown_override(self) -> None:
        with pytest.raises(ConfigError):
            merge({}, {"toy.unknown": 1})


class TestBuilders:
    """Verify resolved values become experiment configs."""

    def test_toy_config(self) -> None:
        config = toy_config({"seed": "3", "toy.n_max": "12", "toy.lambda_grid": "1e-3"})
        assert config.seed == 3 and config.n_max == 12
        assert len(config.lambda_grid) == 1

    def test_toy_bad_number(self) -> None:
        with pytest.raises(ConfigError, match="toy.n_max"):
            toy_config({"toy.n_max": "many"})

    def test_eval_config(self) -> None:
        config = eval_config({"eval.order": "2", "eval.runs": "3", "eval.interval_end": "120"})
        assert config.order == 2 and config.runs == 3 and config.interval_end == 120.0
        assert len(config.lambda_grid) == 27

    def test_toy_aggregation_holdout(self) -> None:
        assert toy_config({}).aggregation_holdout == 100
        assert toy_config({"toy.aggregation_holdout": "0"}).aggregation_holdout == 0

    def test_threads_default_is_lazy(self) -> None:
        def unreachable() -> int:
            raise AssertionError("default consulted")

        assert threads_from({"threads": "3"}, default=unreachable) == 3

    def test_threads(self) -> None:
        assert threads_from({}, default=lambda: 6) == 6
        assert threads_from({"threads": "2"}, default=lambda: 6) == 2
        with pytest.raises(ConfigError):
            threads_from({"threads": "0"}, default=lambda: 6)
