"""Tests for the stenosis classification protocol and the surrogate vessels."""

from __future__ import annotations

import csv

import numpy as np
import pytest

from errors import ConfigError, DataShapeError
from experiments.stenosis import (
    SEVERITY_LEVELS,
    EvalConfig,
    classify_eval,
    default_lambda_grid,
    evaluate_runs,
    stratified_split,
    surrogate_profiles,
    surrogate_stenosis_dataset,
    write_metrics_csv,
)
from funcdata import Dataset, build_grid


@pytest.fixture
def vessel_grid():
    return build_grid(0.0, 140.0, 128)


@pytest.fixture
def vessels(vessel_grid) -> Dataset:
    return surrogate_stenosis_dataset(7, 33, np.random.default_rng(0), vessel_grid)


class TestSurrogate:
    """Tests for the synthetic vessel generator."""

    def test_counts_and_labels(self) -> None:
        profiles = surrogate_profiles(7, 33, np.random.default_rng(1))
        labels = [p.label for p in profiles]
        assert sum(label > 0 for label in labels) == 7
        assert all(label == 0.0 or label in SEVERITY_LEVELS for label in labels)

    def test_profiles_cover_interval(self) -> None:
        profiles = surrogate_profiles(3, 3, np.random.default_rng(2))
        assert all(p.positions[0] == 0.0 and p.length >= 140.0 for p in profiles)
        assert all(np.all(np.diff(p.positions) > 0) for p in profiles)
        assert all(np.all(p.values > 0) for p in profiles)

    def test_dataset_on_grid(self, vessels, vessel_grid) -> None:
        assert vessels.n == 40
        assert all(x.conforms_to(vessel_grid) for x in vessels.samples)

    def test_cubic_interpolant(self, vessel_grid) -> None:
        data = surrogate_stenosis_dataset(2, 2, np.random.default_rng(3), vessel_grid, "cubic")
        assert data.n == 4

    def test_deterministic(self, vessel_grid) -> None:
        a = surrogate_stenosis_dataset(2, 3, np.random.default_rng(9), vessel_grid)
        b = surrogate_stenosis_dataset(2, 3, np.random.default_rng(9), vessel_grid)
        np.testing.assert_array_equal(a.values_matrix(), b.values_matrix())

    def test_empty_rejected(self) -> None:
        with pytest.raises(ConfigError):
            surrogate_profiles(0, 0, np.random.default_rng(0))


class TestStratifiedSplit:
    """Verify per-stratum train/test splits."""

    def test_paper_protocol_sizes(self, vessels) -> None:
        train, test = stratified_split(vessels, 4, 16, np.random.default_rng(0))
        assert (train.responses > 0).sum() == 4 and (train.responses == 0).sum() == 16
        assert (test.responses > 0).sum() == 3 and (test.responses == 0).sum() == 17
        assert not set(train.ids) & set(test.ids)

    def test_no_positive_draw(self, vessels) -> None:
        _, test = stratified_split(vessels, 0, 16, np.random.default_rng(0))
        assert (test.responses > 0).sum() == 7

    def test_deterministic(self, vessels) -> None:
        a, _ = stratified_split(vessels, 4, 16, np.random.default_rng(42))
        b, _ = stratified_split(vessels, 4, 16, np.random.default_rng(42))
        assert a.ids == b.ids

    def test_insufficient_stratum(self, vessels) -> None:
        with pytest.raises(DataShapeError, match="insufficient strata"):
            stratified_split(vessels, 8, 16, np.random.default_rng(0))


class TestClassifyEval:
    """Tests for one train/test classification run."""

    def test_one_metric_per_model(self, vessels) -> None:
        train, test = stratified_split(vessels, 4, 16, np.random.default_rng(0))
        result = classify_eval(train, test, default_lambda_grid(1), order=1)
        assert len(result.models) == 9
        for m in result.models + (result.aggregated,):
            assert m.tp + m.fn == 3 and m.tn + m.fp == 17
            assert 0.0 <= m.auc <= 1.0

    def test_lambda_order_checked(self, vessels) -> None:
        train, test = stratified_split(vessels, 4, 16, np.random.default_rng(0))
        with pytest.raises(ConfigError):
            classify_eval(train, test, default_lambda_grid(2), order=1)


class TestEvaluateRuns:
    """Tests for averaging metrics over repeated runs."""

    def test_rows_and_ranges(self, vessels) -> None:
        summary = evaluate_runs(vessels, EvalConfig(runs=3, order=1))
        assert len(summary.rows) == 10
        assert summary.rows[-1].model == "AGG"
        for row in summary.rows:
            for value in (row.se, row.sp, row.auc):
                assert 0.0 <= value <= 1.0

    def test_quadratic_family(self, vessels) -> None:
        summary = evaluate_runs(vessels, EvalConfig(runs=1, order=2))
        assert summary.family == "quadratic"
        assert len(summary.rows) == 28

    def test_threads_do_not_change_results(self, vessels) -> None:
        config = EvalConfig(runs=4, order=1, seed=5)
        assert evaluate_runs(vessels, config, threads=1).rows == evaluate_runs(vessels, config, threads=3).rows

    def test_aggregation_split(self, vessels) -> None:
        summary = evaluate_runs(vessels, EvalConfig(runs=1, order=1, aggregation_split=0.25))
        assert len(summary.rows) == 10

    def test_metrics_csv(self, vessels, tmp_path) -> None:
        summary = evaluate_runs(vessels, EvalConfig(runs=1, order=1))
        path = write_metrics_csv(summary, tmp_path / "metrics.csv")
        rows = list(csv.reader(path.read_text().splitlines()))
        assert rows[0] == ["model", "SE", "SP", "AUC"]
        assert len(rows) == 11 and rows[-1][0] == "AGG"


class TestEvalConfig:
    """Verify classification config validation."""

    def test_defaults(self) -> None:
        config = EvalConfig()
        assert config.runs == 10 and config.threshold == 0.5
        assert (config.train_pos, config.train_neg) == (4, 16)
        assert len(config.lambda_grid) == 9

    @pytest.mark.parametrize(
        "kwargs",
        [{"runs": 0}, {"aggregation_split": 1.0}, {"interpolant": "akima"}, {"interval_end": -1.0}],
    )
    def test_invalid(self, kwargs) -> None:
        with pytest.raises(ConfigError):
            EvalConfig(**kwargs)
