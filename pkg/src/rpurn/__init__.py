"""Locally reinforced (rescaled) Polya urn models for binary sentiment streams.

The package covers the whole workflow: exact urn engines (``urns``),
two-color one-step-ahead predictors (``predictors``), slot-based maximum
likelihood fitting (``fitting``), forecast scoring and curve smoothing
(``metrics``, ``smoothing``), record ingestion (``ingest``), a scikit-learn
style estimator facade (``estimators``) and a batch CLI (``cli``).
"""

from .estimators import CompleteRP, NoFashionRP, OnlyFashionRP, StandardPolya
from .errors import ConfigError, DataFormatError, NumericError, RPUrnError
from .fitting import (
    MODEL_NAMES,
    FitResult,
    ParamTrajectory,
    SlotScheme,
    fit,
    fit_trajectory,
    log_likelihood,
)
from .ingest import BinarySeries, Descriptives, PostRecord, binarize, descriptives
from .metrics import EvalReport, PredictionRun, majority_value, mse_smoothed, ss_rel, theoretical_value
from .pipeline import run_fit_eval
from .predictors import (
    ApproxParams,
    PolyaPredictorParams,
    PredictorState,
    advance,
    initial_state,
    one_step_path,
    predict,
    run_series,
    simulate_series,
)
from .smoothing import SmoothedCurve, smooth
from .urns import (
    PolyaUrnState,
    RPUrnState,
    polya_update,
    predictive_means,
    rp_update,
    simulate,
    total_balls_closed_form,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ApproxParams",
    "BinarySeries",
    "CompleteRP",
    "ConfigError",
    "DataFormatError",
    "Descriptives",
    "EvalReport",
    "FitResult",
    "MODEL_NAMES",
    "NoFashionRP",
    "NumericError",
    "OnlyFashionRP",
    "ParamTrajectory",
    "PolyaPredictorParams",
    "PolyaUrnState",
    "PostRecord",
    "PredictionRun",
    "PredictorState",
    "RPUrnError",
    "RPUrnState",
    "SlotScheme",
    "SmoothedCurve",
    "StandardPolya",
    "advance",
    "binarize",
    "descriptives",
    "fit",
    "fit_trajectory",
    "initial_state",
    "log_likelihood",
    "majority_value",
    "mse_smoothed",
    "one_step_path",
    "polya_update",
    "predict",
    "predictive_means",
    "rp_update",
    "run_fit_eval",
    "run_series",
    "simulate",
    "simulate_series",
    "smooth",
    "ss_rel",
    "theoretical_value",
    "total_balls_closed_form",
]
