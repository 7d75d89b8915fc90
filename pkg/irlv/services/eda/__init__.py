from irlv.schemas.eda import EdaModel

from .eda_service import (
    DistanceEstimate,
    PositionFit,
    eda_decide,
    eda_scores,
    estimate_position,
    fit_positions,
    invert_path_loss,
)

__all__ = [
    "DistanceEstimate",
    "EdaModel",
    "PositionFit",
    "eda_decide",
    "eda_scores",
    "estimate_position",
    "fit_positions",
    "invert_path_loss",
]
