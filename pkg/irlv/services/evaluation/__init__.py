from irlv.schemas.run import Experiment

from .experiment_service import (
    ExperimentResult,
    ExperimentService,
    MapData,
    MapResult,
    evaluate_map,
    grid_map,
    map_data,
    run_experiment,
    simulate_map,
)
from .roc import (
    ROC_COLUMNS,
    RateEstimate,
    RocCurve,
    auc,
    average_curves,
    calibrate_threshold,
    estimate_rates,
    lower_envelope,
    md_at_fa,
    operating_points,
    pooled_rates,
    rates_at,
    roc_from_scores,
    roc_sweep,
    wilson_interval,
)
from .verifiers import Verifier, VerifierFactory

__all__ = [
    "ROC_COLUMNS",
    "Experiment",
    "ExperimentResult",
    "ExperimentService",
    "MapData",
    "MapResult",
    "RateEstimate",
    "RocCurve",
    "Verifier",
    "VerifierFactory",
    "auc",
    "average_curves",
    "calibrate_threshold",
    "estimate_rates",
    "evaluate_map",
    "grid_map",
    "lower_envelope",
    "map_data",
    "md_at_fa",
    "operating_points",
    "pooled_rates",
    "rates_at",
    "roc_from_scores",
    "roc_sweep",
    "run_experiment",
    "simulate_map",
    "wilson_interval",
]
