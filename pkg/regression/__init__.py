from .base import LambdaVector, Predictor, lambda_grid
from .mp_solver import (
    PolyModel,
    assemble_system,
    fit,
    fit_grid,
    fit_single_parameter,
    solve_system,
)
from .model_eval import (
    SeparableTerm,
    TruthMoments,
    TruthPolynomial,
    apply_truth,
    dense_projection_residual,
    empirical_risk,
    l2_error,
    l2_error_coefficients,
    read_truth_csv,
    representer_distance,
    toy_truth,
    truth_inner_with_tensor,
    truth_moments,
    truth_norm_sq,
)
from .aggregation import (
    AggregatedModel,
    aggregate,
    build_g_tilde,
    build_gram_tilde,
    combined_coefficients,
    predict_aggregated,
    solve_aggregation,
)
from .serialization import load_model, save_model
