from irlv.enums import LosRule, LosState, RegionLabel

from .scenarios import (
    AccessPoint,
    Position,
    RingScenario,
    RoiRect,
    Scenario,
    ScenarioConfig,
    StreetStrip,
    UrbanScenario,
    alternative_roi_scenario,
    as_points,
    contains_roi,
    default_urban_scenario,
    los_state,
    measurement_campaign_scenario,
    sample_uniform,
    signed_border_distance,
)

__all__ = [
    "AccessPoint",
    "LosRule",
    "LosState",
    "Position",
    "RegionLabel",
    "RingScenario",
    "RoiRect",
    "Scenario",
    "ScenarioConfig",
    "StreetStrip",
    "UrbanScenario",
    "alternative_roi_scenario",
    "as_points",
    "contains_roi",
    "default_urban_scenario",
    "los_state",
    "measurement_campaign_scenario",
    "sample_uniform",
    "signed_border_distance",
]
