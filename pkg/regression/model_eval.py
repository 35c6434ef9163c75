"""Analytic targets u+ and the L2 distance between them and fitted models.

Targets are sums of separable terms, coefficient · g_1(s_1)···g_l(s_l), so
every norm and inner product with a representer expansion factorises into
1-D quadratures.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg as la

from errors import DataShapeError
from funcdata import Dataset, FunctionalSample, Grid, GramMatrix, inner_product
from regression.mp_solver import PolyModel

logger = logging.getLogger(__name__)

CLAMP_WARN = 1e-10


@dataclass(frozen=True)
class SeparableTerm:
    coefficient: float
    factors: tuple[FunctionalSample, ...]

    @property
    def degree(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class TruthPolynomial:
    """u+ = (u0+, ..., up+), with each u_l+ a list of separable terms."""

    order: int
    constant: float
    terms: Mapping[int, tuple[SeparableTerm, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for degree, terms in self.terms.items():
            if not 1 <= degree <= self.order:
                raise DataShapeError(f"truth term of degree {degree} outside 1..{self.order}")
            for term in terms:
                if term.degree != degree:
                    raise DataShapeError(
                        f"degree-{degree} term has {term.degree} factors"
                    )

    def degree_terms(self, degree: int) -> tuple[SeparableTerm, ...]:
        return tuple(self.terms.get(degree, ()))


def truth_inner_with_tensor(
    terms: Sequence[SeparableTerm], x: FunctionalSample, grid: Grid
) -> float:
    """<u_l+, x ⊗ ... ⊗ x> = sum_terms coefficient · prod_j <g_j, x>."""
    total = 0.0
    for term in terms:
        if term.degree < 1:
            raise DataShapeError("tensor terms need degree >= 1")
        product = term.coefficient
        for factor in term.factors:
            product *= inner_product(factor, x, grid)
        total += product
    return total


def apply_truth(truth: TruthPolynomial, x: FunctionalSample, grid: Grid) -> float:
    """Noise-free response u0+ + sum_l <u_l+, x^{⊗l}>."""
    return truth.constant + sum(
        truth_inner_with_tensor(truth.degree_terms(degree), x, grid)
        for degree in range(1, truth.order + 1)
    )


def _term_inner(a: SeparableTerm, b: SeparableTerm, grid: Grid) -> float:
    product = a.coefficient * b.coefficient
    for fa, fb in zip(a.factors, b.factors):
        product *= inner_product(fa, fb, grid)
    return product


def truth_norm_sq(terms: Sequence[SeparableTerm], grid: Grid) -> float:
    """||u_l+||^2 expanded over term pairs."""
    return float(sum(_term_inner(a, b, grid) for a in terms for b in terms))


@dataclass(frozen=True, eq=False)
class TruthMoments:
    """||u_l+||^2 and <u_l+, X_i^{⊗l}> per degree, for one training set."""

    norms_sq: tuple[float, ...]
    projections: np.ndarray

    def leading(self, n: int) -> TruthMoments:
        """Moments of the first ``n`` training samples."""
        return TruthMoments(self.norms_sq, self.projections[:, :n])


def truth_moments(truth: TruthPolynomial, training: Dataset) -> TruthMoments:
    grid = training.grid
    norms, rows = [], []
    for degree in range(1, truth.order + 1):
        terms = truth.degree_terms(degree)
        norms.append(truth_norm_sq(terms, grid))
        rows.append([truth_inner_with_tensor(terms, x, grid) for x in training.samples])
    return TruthMoments(tuple(norms), np.array(rows, dtype=float).reshape(truth.order, training.n))


def l2_error_coefficients(
    intercept: float,
    coeffs: np.ndarray,
    training: Dataset,
    gram_matrix: GramMatrix,
    truth: TruthPolynomial,
    moments: TruthMoments | None = None,
) -> float:
    """||u+ - u|| for u given by representer coefficients on ``training``."""
    coeffs = np.asarray(coeffs, dtype=float)
    order = coeffs.shape[0]
    if order != truth.order:
        raise DataShapeError(f"model order {order} != truth order {truth.order}")
    if moments is None:
        moments = truth_moments(truth, training)
    if moments.projections.shape != coeffs.shape:
        raise DataShapeError(
            f"truth moments cover {moments.projections.shape[1]} samples, model has {coeffs.shape[1]}"
        )
    sq = (truth.constant - intercept) ** 2
    for degree in range(1, order + 1):
        b = coeffs[degree - 1]
        sq += (
            moments.norms_sq[degree - 1]
            - 2.0 * float(b @ moments.projections[degree - 1])
            + float(b @ gram_matrix.power(degree) @ b)
        )
    if sq < -CLAMP_WARN * max(1.0, abs(sq)):
        logger.warning("squared error %.3g clamped to 0", sq)
    return math.sqrt(max(sq, 0.0))


def l2_error(
    model: PolyModel,
    truth: TruthPolynomial,
    gram_matrix: GramMatrix | None = None,
    moments: TruthMoments | None = None,
) -> float:
    """||u+ - u_λ^N|| in the product L2 space."""
    if model.order != truth.order:
        raise DataShapeError(f"model order {model.order} != truth order {truth.order}")
    if gram_matrix is None:
        gram_matrix = model.gram
    return l2_error_coefficients(
        model.intercept, model.coeffs, model.training, gram_matrix, truth, moments
    )


def representer_distance(a: PolyModel, b: PolyModel) -> float:
    """||u_a - u_b|| for two models fitted on the same training inputs."""
    if a.training is not b.training and not (
        a.n == b.n and np.array_equal(a.training.values_matrix(), b.training.values_matrix())
    ):
        raise DataShapeError("models were fitted on different training sets")
    if a.order != b.order:
        raise DataShapeError(f"model orders differ: {a.order} vs {b.order}")
    sq = (a.intercept - b.intercept) ** 2
    for degree in range(1, a.order + 1):
        d = a.coeffs[degree - 1] - b.coeffs[degree - 1]
        sq += float(d @ a.gram.power(degree) @ d)
    return math.sqrt(max(sq, 0.0))


def empirical_risk(predictions: Sequence[float], responses: Sequence[float]) -> float:
    """(1/N) sum_i (Y_i - pred_i)^2."""
    predictions = np.asarray(predictions, dtype=float)
    responses = np.asarray(responses, dtype=float)
    if predictions.shape != responses.shape:
        raise DataShapeError(
            f"{predictions.size} predictions for {responses.size} responses"
        )
    return float(np.mean((responses - predictions) ** 2))


def dense_projection_residual(
    terms: Sequence[SeparableTerm], samples: Sequence[FunctionalSample], grid: Grid
) -> float:
    """Distance from a degree-2 target to span{X_i ⊗ X_i}, on the full 2-D grid."""
    if any(term.degree != 2 for term in terms):
        raise DataShapeError("dense projection is only available for degree-2 targets")
    target = np.zeros((grid.size, grid.size))
    for term in terms:
        target += term.coefficient * np.outer(term.factors[0].values, term.factors[1].values)
    sqrt_w = np.sqrt(np.outer(grid.weights, grid.weights)).ravel()
    basis = np.column_stack([np.outer(x.values, x.values).ravel() * sqrt_w for x in samples])
    rhs = target.ravel() * sqrt_w
    coef, *_ = la.lstsq(basis, rhs, lapack_driver="gelsd")
    return float(np.linalg.norm(rhs - basis @ coef))


# ── Analytic targets ────────────────────────────────────────────────────


def _cos(k: float):
    return lambda t: np.cos(k * t)


def _const(c: float):
    return lambda t: np.full_like(t, c)


FACTOR_ATOMS = {"cos": _cos, "const": _const}


def parse_factor_spec(spec: str, grid: Grid) -> FunctionalSample:
    """``cos:k`` or ``const:c`` tabulated on ``grid``."""
    kind, _, arg = spec.strip().partition(":")
    atom = FACTOR_ATOMS.get(kind)
    if atom is None or not arg:
        raise DataShapeError(f"bad factor spec {spec!r}; expected cos:k or const:c")
    try:
        value = float(arg)
    except ValueError:
        raise DataShapeError(f"bad factor spec {spec!r}: {arg!r} is not a number") from None
    return FunctionalSample.from_function(grid, atom(value))


def read_truth_csv(path: str | Path, grid: Grid) -> TruthPolynomial:
    """Rows ``degree,coefficient,factor_1,...``; a degree-0 row sets u0+."""
    constant = 0.0
    terms: dict[int, list[SeparableTerm]] = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].strip().startswith("#") or row[0].strip() == "degree":
                continue
            try:
                degree, coefficient = int(row[0]), float(row[1])
            except (ValueError, IndexError):
                raise DataShapeError(f"{path}:{lineno}: malformed truth row {row}") from None
            factors = tuple(parse_factor_spec(s, grid) for s in row[2:] if s.strip())
            if degree == 0:
                constant += coefficient
                continue
            if len(factors) != degree:
                raise DataShapeError(f"{path}:{lineno}: degree {degree} needs {degree} factors")
            terms.setdefault(degree, []).append(SeparableTerm(coefficient, factors))
    order = max(terms, default=0)
    return TruthPolynomial(order, constant, {d: tuple(t) for d, t in terms.items()})


def toy_truth(grid: Grid) -> TruthPolynomial:
    """u0+ = 2, u1+ = 1 + 4 cos t + cos 5t, u2+ = cos 3t + cos 2t cos 2τ."""
    one = FunctionalSample.from_function(grid, _const(1.0))
    cos = {k: FunctionalSample.from_function(grid, _cos(k)) for k in (1, 2, 3, 5)}
    return TruthPolynomial(
        order=2,
        constant=2.0,
        terms={
            1: (
                SeparableTerm(1.0, (one,)),
                SeparableTerm(4.0, (cos[1],)),
                SeparableTerm(1.0, (cos[5],)),
            ),
            2: (
                SeparableTerm(1.0, (cos[3], one)),
                SeparableTerm(1.0, (cos[2], cos[2])),
            ),
        },
    )
