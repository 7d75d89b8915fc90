# irlv/schemas/eda/eda_schemas.py
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from irlv.schemas.channel import ChannelParams
from irlv.services.geometry import ScenarioConfig


class EdaModel(BaseModel):
    """Distance-inversion baseline: the path-loss law and per-link LOS state are assumed known."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    scenario: ScenarioConfig
    params: ChannelParams = Field(default_factory=ChannelParams)
    d_delta: float = Field(0.0, description="threshold on the signed border distance, meters")
    n_starts: int = Field(10, ge=1, description="least-squares starts drawn uniformly over the area")
    tol: float = Field(1e-8, gt=0, description="solver tolerance on cost, step and gradient")
    max_iter: int = Field(100, ge=1, description="residual evaluations per start")
    d_min: float = Field(1.0, gt=0, description="smallest distance an inversion may return")
    d_max: Optional[float] = Field(None, gt=0, description="largest distance; defaults to the area diagonal")
    seed: int = 0

    @property
    def distance_cap(self) -> float:
        return self.d_max or self.scenario.area_diagonal()
