from .model_enums import (
    Activation,
    LlrVariant,
    LossKind,
    ModelKind,
    ScalerKind,
    ShadowingAcrossAps,
    ShadowingKind,
    SvmVariant,
)
from .region_enums import LosRule, LosState, RegionLabel, ScenarioKind
from .response_codes import ErrorCodeEnum

__all__ = [
    "Activation",
    "ErrorCodeEnum",
    "LlrVariant",
    "LossKind",
    "LosRule",
    "LosState",
    "ModelKind",
    "RegionLabel",
    "ScalerKind",
    "ScenarioKind",
    "ShadowingAcrossAps",
    "ShadowingKind",
    "SvmVariant",
]
