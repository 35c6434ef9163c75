from .runner import default_threads, gather_tasks, run_tasks
from .metrics import BinaryMetrics, auc_rank, binary_metrics, roc_curve
from .toy import (
    ErrorCurve,
    ErrorCurveRow,
    ToyConfig,
    error_curve,
    toy_dataset,
    toy_sample,
    write_error_curve_csv,
)
from .stenosis import (
    ClassifyResult,
    EvalConfig,
    EvalSummary,
    classify_eval,
    evaluate_runs,
    stratified_split,
    surrogate_profiles,
    surrogate_stenosis_dataset,
    write_metrics_csv,
)
from .config import eval_config, load_config_file, merge, parse_lambda_grid, toy_config
