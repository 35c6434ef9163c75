"""Tests for analytic targets, the L2 reconstruction error and empirical risk."""

from __future__ import annotations

import math

import numpy as np
import pytest

from errors import DataShapeError
from experiments.toy import ToyConfig, toy_sample
from funcdata import Dataset, FunctionalSample, build_grid, gram
from regression import (
    LambdaVector,
    PolyModel,
    SeparableTerm,
    TruthPolynomial,
    dense_projection_residual,
    empirical_risk,
    fit,
    l2_error,
    read_truth_csv,
    representer_distance,
    truth_inner_with_tensor,
    truth_norm_sq,
)


def _cos(grid, k: float) -> FunctionalSample:
    return FunctionalSample.from_function(grid, lambda t: np.cos(k * t))


def dense_error(model: PolyModel, truth: TruthPolynomial) -> float:
    """Same norm evaluated on full tensor grids."""
    grid = model.training.grid
    w = grid.weights
    x = model.training.values_matrix()
    sq = (truth.constant - model.intercept) ** 2

    u1 = sum(t.coefficient * t.factors[0].values for t in truth.degree_terms(1))
    d1 = u1 - model.coeffs[0] @ x
    sq += float(np.dot(w, d1 * d1))

    u2 = sum(t.coefficient * np.outer(t.factors[0].values, t.factors[1].values) for t in truth.degree_terms(2))
    d2 = u2 - np.einsum("i,ia,ib->ab", model.coeffs[1], x, x)
    sq += float(np.einsum("a,b,ab->", w, w, d2 * d2))
    return math.sqrt(sq)


class TestTruthInner:
    """Verify truth evaluation on separable terms."""

    def test_product_term(self, period_grid) -> None:
        term = SeparableTerm(1.0, (_cos(period_grid, 2), _cos(period_grid, 2)))
        value = truth_inner_with_tensor([term], _cos(period_grid, 2), period_grid)
        assert value == pytest.approx(math.pi**2, rel=1e-12)

    def test_linear_part_picks_cosine(self, truth, period_grid) -> None:
        value = truth_inner_with_tensor(truth.degree_terms(1), _cos(period_grid, 1), period_grid)
        assert value == pytest.approx(4 * math.pi, rel=1e-12)

    def test_zero_input(self, truth, period_grid) -> None:
        zero = FunctionalSample(np.zeros(period_grid.size))
        assert truth_inner_with_tensor(truth.degree_terms(2), zero, period_grid) == 0.0

    def test_norms(self, truth, period_grid) -> None:
        assert truth_norm_sq(truth.degree_terms(1), period_grid) == pytest.approx(19 * math.pi, rel=1e-12)
        assert truth_norm_sq(truth.degree_terms(2), period_grid) == pytest.approx(3 * math.pi**2, rel=1e-12)

    def test_factor_count_must_match_degree(self, period_grid) -> None:
        with pytest.raises(DataShapeError):
            TruthPolynomial(2, 0.0, {2: (SeparableTerm(1.0, (_cos(period_grid, 1),)),)})

    def test_degree_outside_order(self, period_grid) -> None:
        with pytest.raises(DataShapeError):
            TruthPolynomial(1, 0.0, {2: (SeparableTerm(1.0, (_cos(period_grid, 1),) * 2),)})


class TestL2Error:
    """Tests for the Gram-expansion L² error."""

    def test_zero_model(self, truth, toy_data) -> None:
        g = gram(toy_data)
        zero = PolyModel(2, 0.0, np.zeros((2, toy_data.n)), toy_data, g, LambdaVector.uniform(1.0, 2))
        expected = math.sqrt(4 + 19 * math.pi + 3 * math.pi**2)
        assert l2_error(zero, truth) == pytest.approx(expected, rel=1e-9)
        assert dense_error(zero, truth) == pytest.approx(expected, rel=1e-9)

    def test_exact_representer(self, period_grid) -> None:
        x1, x2 = _cos(period_grid, 1), FunctionalSample.from_function(period_grid, lambda t: 1 + np.sin(t))
        data = Dataset(period_grid, (x1, x2), [0.0, 0.0])
        truth = TruthPolynomial(
            2, 1.5, {1: (SeparableTerm(1.0, (x1,)),), 2: (SeparableTerm(2.0, (x2, x2)),)}
        )
        model = PolyModel(
            2, 1.5, np.array([[1.0, 0.0], [0.0, 2.0]]), data, gram(data), LambdaVector.uniform(0.0, 2)
        )
        assert l2_error(model, truth) <= 1e-6

    def test_matches_dense_tensor_quadrature(self, truth, toy_data) -> None:
        data = toy_data.head(8)
        for lambdas in (LambdaVector((1e-3, 1e-2, 1e-1)), LambdaVector((1.0, 1e-4, 1e-2))):
            model = fit(data, lambdas)
            assert l2_error(model, truth) == pytest.approx(dense_error(model, truth), rel=1e-6)

    def test_non_negative(self, truth, toy_data) -> None:
        model = fit(toy_data, LambdaVector.uniform(1e-6, 2))
        assert l2_error(model, truth) >= 0.0

    def test_order_mismatch(self, truth, toy_data) -> None:
        model = fit(toy_data, LambdaVector((0.1, 0.1)))
        with pytest.raises(DataShapeError, match="order"):
            l2_error(model, truth)

    def test_triangle_inequality(self, truth, toy_data) -> None:
        a = fit(toy_data, LambdaVector((1e-3, 1e-3, 1e-3)))
        b = fit(toy_data, LambdaVector((1e-1, 1e-2, 1.0)))
        assert l2_error(a, truth) <= representer_distance(a, b) + l2_error(b, truth) + 1e-8

    def test_distance_to_self(self, toy_data) -> None:
        a = fit(toy_data, LambdaVector((1e-3, 1e-3, 1e-3)))
        assert representer_distance(a, a) == 0.0


class TestSaturationOracle:
    """Verify the dense projection residual behind the π level."""

    @pytest.mark.slow
    def test_projection_residual_is_pi(self) -> None:
        grid = build_grid(0.0, 2.0 * math.pi, 128)
        data = toy_sample(ToyConfig(seed=0, grid_nodes=128), 30, grid=grid)
        from regression import toy_truth

        residual = dense_projection_residual(toy_truth(grid).degree_terms(2), data.samples, grid)
        assert abs(residual - math.pi) < 1e-3

    def test_needs_degree_two(self, truth, period_grid) -> None:
        with pytest.raises(DataShapeError):
            dense_projection_residual(truth.degree_terms(1), [], period_grid)


class TestEmpiricalRisk:
    """Tests for the mean squared training error."""

    def test_perfect(self) -> None:
        assert empirical_risk([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_constant_offset(self) -> None:
        assert empirical_risk([2.0, 3.0, 4.0], [1.0, 2.0, 3.0]) == 1.0

    def test_hand_example(self) -> None:
        assert empirical_risk([1.0, 1.0], [0.0, 2.0]) == 1.0

    def test_length_mismatch(self) -> None:
        with pytest.raises(DataShapeError):
            empirical_risk([1.0], [1.0, 2.0])


class TestTruthFile:
    """Tests for reading truth polynomials from CSV."""

    def test_toy_truth_from_csv(self, tmp_path, period_grid, truth) -> None:
        path = tmp_path / "truth.csv"
        path.write_text(
            "degree,coefficient,factor_1,factor_2\n"
            "0,2\n"
            "1,1,const:1\n"
            "1,4,cos:1\n"
            "1,1,cos:5\n"
            "2,1,cos:3,const:1\n"
            "2,1,cos:2,cos:2\n"
        )
        parsed = read_truth_csv(path, period_grid)
        assert parsed.order == 2 and parsed.constant == 2.0
        for degree in (1, 2):
            assert truth_norm_sq(parsed.degree_terms(degree), period_grid) == pytest.approx(
                truth_norm_sq(truth.degree_terms(degree), period_grid), rel=1e-12
            )

    def test_bad_factor(self, tmp_path, period_grid) -> None:
        path = tmp_path / "truth.csv"
        path.write_text("1,1,sin:2\n")
        with pytest.raises(DataShapeError, match="factor spec"):
            read_truth_csv(path, period_grid)

    def test_wrong_factor_count(self, tmp_path, period_grid) -> None:
        path = tmp_path / "truth.csv"
        path.write_text("2,1,cos:2\n")
        with pytest.raises(DataShapeError, match="needs 2 factors"):
            read_truth_csv(path, period_grid)
