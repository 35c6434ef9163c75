"""Tests for saving and loading fitted models."""

from __future__ import annotations

import json

import numpy as np
import pytest

from errors import DataShapeError
from regression import LambdaVector, fit, load_model, save_model
from tests.conftest import random_inputs


class TestModelFiles:
    """Tests for saving and loading fitted models."""

    def test_round_trip_is_exact(self, tmp_path, toy_data) -> None:
        model = fit(toy_data, LambdaVector((1e-3, 1e-2, 1e-1)))
        save_model(model, tmp_path)
        back = load_model(tmp_path / "model.json")
        assert back.intercept == model.intercept
        np.testing.assert_array_equal(back.coeffs, model.coeffs)
        assert back.lambdas == model.lambdas
        new = random_inputs(toy_data.grid, 3, np.random.default_rng(0))
        np.testing.assert_array_equal(back.predict_many(new), model.predict_many(new))

    def test_directory_path(self, tmp_path, small_dataset) -> None:
        model = fit(small_dataset, LambdaVector((0.1, 0.1)))
        save_model(model, tmp_path / "m")
        assert load_model(tmp_path / "m").order == 1

    def test_sidecar_contents(self, tmp_path, small_dataset) -> None:
        model = fit(small_dataset, LambdaVector((0.1, 0.2)))
        meta = json.loads(save_model(model, tmp_path).read_text())
        assert meta["order"] == 1 and meta["n"] == 4
        assert meta["lambdas"] == [0.1, 0.2]
        assert meta["grid"]["n_nodes"] == small_dataset.grid.size

    def test_incomplete_table(self, tmp_path, small_dataset) -> None:
        model = fit(small_dataset, LambdaVector((0.1, 0.2)))
        save_model(model, tmp_path)
        lines = (tmp_path / "model.csv").read_text().splitlines()
        (tmp_path / "model.csv").write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(DataShapeError, match="incomplete"):
            load_model(tmp_path)
