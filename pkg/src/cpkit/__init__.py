"""Distribution-free prediction sets and intervals by split-conformal calibration.

The package calibrates set-valued classifiers and interval regressors
from held-out model outputs, applies them to tables or raster grids,
and measures the coverage and efficiency that come out.
"""

__version__ = "0.1.0"

from .calibration import (
    CalibratedClassifier,
    CalibratedRegressor,
    PerClassThreshold,
    calibrate_abs_regressor,
    calibrate_cqr,
    calibrate_lac,
    calibrate_mondrian,
    decode_model,
    encode_model,
    load_model,
    save_model,
)
from .core import (
    ConfidenceSpec,
    ConformalQuantileResult,
    LabeledExample,
    ProbabilityVector,
    RegressionExample,
    conformal_quantile,
    corrected_rank,
    quantile_level,
    validate_probability_vector,
)
from .errors import CpkitError, ValidationError
from .evaluation import (
    CoverageReport,
    EfficiencyReport,
    ThresholdRow,
    ThresholdTable,
    efficiency_report,
    empirical_coverage_intervals,
    empirical_coverage_sets,
    format_threshold_table,
    grouped_standard_error,
    per_class_coverage,
    sweep_thresholds,
)
from .prediction import (
    PredictionInterval,
    PredictionSet,
    predict_interval_abs,
    predict_interval_cqr,
    predict_set,
    predict_set_lac,
    predict_set_mondrian,
)
from .scores import (
    ScoreVector,
    absolute_residual_score,
    cqr_score,
    hinge_score,
    score_calibration_set,
)

__all__ = [name for name in dir() if not name.startswith("_")]
