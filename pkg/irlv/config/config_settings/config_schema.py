from typing import Optional

from pydantic import BaseModel, Field


class LoggingConfig(BaseModel):
    enable_file: bool = True
    log_dir: str = "logs"
    rotation: str = "1 week"
    retention: str = "1 month"


class RunnerConfig(BaseModel):
    """Defaults for the experiment runner, overridable per run."""
    jobs: int = Field(1, ge=1, description="并行处理的 shadowing map 数量上限")
    export_metrics: bool = Field(False, description="Write a Prometheus text file next to run outputs")
    output_root: str = Field("runs", description="Base directory for relative output paths")


class ShadowingSolverConfig(BaseModel):
    """Limits of the joint Gaussian-field factorization."""
    max_exact_points: int = Field(
        4000, ge=2,
        description="Above this many positions the field is generated on a grid and interpolated",
    )
    grid_spacing_m: Optional[float] = Field(
        None, gt=0,
        description="Grid spacing for the interpolated mode; defaults to d_c / 10",
    )
    jitter: float = Field(1e-9, gt=0, description="Diagonal regularizer relative to sigma^2")


# ========================================================================================
#
#   所有配置模型都要写在 AppConfig 上方
#
# ========================================================================================
class AppConfig(BaseModel):
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    runner: RunnerConfig = Field(default_factory=RunnerConfig)
    shadowing: ShadowingSolverConfig = Field(default_factory=ShadowingSolverConfig)
