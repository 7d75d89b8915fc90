from irlv.schemas.channel import ChannelParams, ChannelSection

from .attenuation import (
    AttenuationDataset,
    FeatureVector,
    average_fading,
    build_dataset,
    draw_attenuations,
    mean_attenuation_db,
    sample_attenuation,
    sample_positions,
)
from .path_loss import db_to_linear, linear_to_db, mean_path_loss_db, path_loss_los_db, path_loss_nlos_db
from .shadowing import ShadowingMap, exponential_covariance, generate_shadowing_map

__all__ = [
    "AttenuationDataset",
    "ChannelParams",
    "ChannelSection",
    "FeatureVector",
    "ShadowingMap",
    "average_fading",
    "build_dataset",
    "db_to_linear",
    "draw_attenuations",
    "exponential_covariance",
    "generate_shadowing_map",
    "linear_to_db",
    "mean_attenuation_db",
    "mean_path_loss_db",
    "path_loss_los_db",
    "path_loss_nlos_db",
    "sample_attenuation",
    "sample_positions",
]
