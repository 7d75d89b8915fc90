# irlv/schemas/run/run_schemas.py
"""
Run configuration: one document per experiment, validated before any work.
"""
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from irlv.enums import LlrVariant, ModelKind, ShadowingKind
from irlv.schemas.channel import ChannelSection
from irlv.schemas.learning import KernelConfig
from irlv.services.geometry import RingScenario, ScenarioConfig

SCHEMA_VERSION = 1


class _Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class MlpSection(_Section):
    hidden: Optional[List[int]] = Field(None, description="hidden layer widths; None picks the default per model kind")
    learning_rate: float = Field(0.05, gt=0)
    epochs: int = Field(200, ge=1)
    batch_size: Optional[int] = Field(32, ge=1)


class QuantizedSection(_Section):
    n_levels: int = Field(300, ge=1)
    pseudo_count: float = Field(1.0, ge=0)


class NpSection(_Section):
    variant: Optional[LlrVariant] = Field(None, description="None picks the closed form matching the channel")


class GlrtSection(_Section):
    kde_max_points: int = Field(2000, ge=2)
    bw_method: Optional[float] = Field(None, gt=0)


class EdaSection(_Section):
    d_delta: float = 0.0
    n_starts: int = Field(10, ge=1)
    tol: float = Field(1e-8, gt=0)
    max_iter: int = Field(100, ge=1)
    d_min: float = Field(1.0, gt=0)


class ModelSection(_Section):
    kind: ModelKind
    mlp: MlpSection = Field(default_factory=MlpSection)
    kernel: KernelConfig = Field(default_factory=KernelConfig)
    grid_search: bool = Field(False, description="tune (C, gamma_k) of the two-class LS-SVM on the validation split")
    quantized: QuantizedSection = Field(default_factory=QuantizedSection)
    np: NpSection = Field(default_factory=NpSection)
    glrt: GlrtSection = Field(default_factory=GlrtSection)
    eda: EdaSection = Field(default_factory=EdaSection)


class TrainingSection(_Section):
    n_points: int = Field(..., ge=1, description="training feature vectors S (each averages k_f fading draws)")
    validation_fraction: float = Field(0.2, gt=0, lt=1, description="share of the training vectors kept for calibration")


class EvalSection(_Section):
    n_test_h0: int = Field(10000, ge=1)
    n_test_h1: int = Field(10000, ge=1)
    n_maps: int = Field(1, ge=1, description="shadowing realizations averaged into the reported curve")
    target_fa: float = Field(0.1, gt=0, le=1)
    n_thresholds: Optional[int] = Field(2000, ge=2, description="interior ROC thresholds kept; None keeps all")
    report_fa: List[float] = Field(default_factory=lambda: [0.05, 0.1, 0.2])


class GridSection(_Section):
    """Measured attenuation grid used instead of simulated channels."""
    path: str = Field(..., description="grid CSV with columns x, y, ap_1..ap_N in dB")
    n_train: int = Field(5000, ge=2, description="cells used for training, the rest for testing")


class OutputSection(_Section):
    dir: str = Field("runs/default", description="relative paths resolve against runner.output_root")
    export_metrics: Optional[bool] = None


class Experiment(_Section):
    """Everything needed to produce one averaged ROC."""
    name: str = "experiment"
    scenario: ScenarioConfig
    channel: ChannelSection = Field(default_factory=ChannelSection)
    model: ModelSection
    training: TrainingSection
    eval: EvalSection = Field(default_factory=EvalSection)
    grid: Optional[GridSection] = None
    seed: int = 0

    @model_validator(mode="after")
    def _check_model_fits(self):
        kind = self.model.kind
        ring = isinstance(self.scenario, RingScenario)
        if kind is ModelKind.NP:
            if not ring:
                raise ValueError("model kind 'np' needs the ring scenario (closed-form likelihoods)")
            if self.channel.k_f != 1:
                raise ValueError("the closed-form NP test models a single fading draw, set k_f = 1")
            if not self.channel.fading and self.channel.sigma_s_db <= 0:
                raise ValueError("without fading the NP test needs sigma_s_db > 0")
            if self.channel.sigma_s_db > 0 and self.channel.shadowing is not ShadowingKind.UNCORRELATED:
                raise ValueError("the closed-form NP test assumes uncorrelated shadowing")
        if self.grid is not None and self.eval.n_maps != 1:
            raise ValueError("a measured grid is a single map, set eval.n_maps = 1")
        if self.grid is not None and kind is ModelKind.NP:
            raise ValueError("the closed-form NP test does not apply to measured grids")
        if kind is ModelKind.NP_QUANTIZED and self.scenario.n_aps != 1:
            raise ValueError("the quantized NP test handles a single AP")
        if kind in (ModelKind.MLP_CE, ModelKind.MLP_MSE, ModelKind.LSSVM, ModelKind.NP_QUANTIZED):
            if self.training.n_points < 2:
                raise ValueError(f"{kind.value} needs at least two training vectors")
        return self

    @property
    def sizes(self) -> dict:
        return {
            "S": self.training.n_points,
            "k_f": self.channel.k_f,
            "raw_draws": self.training.n_points * self.channel.k_f,
        }


class RunConfig(Experiment):
    schema_version: Literal[1] = SCHEMA_VERSION
    output: OutputSection = Field(default_factory=OutputSection)


class FigureBundle(_Section):
    """A canned figure: several runs sharing one output directory."""
    schema_version: Literal[1] = SCHEMA_VERSION
    figure: str
    description: str = ""
    requires_grid: bool = False
    runs: List[RunConfig] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _unique_run_names(self):
        names = [r.name for r in self.runs]
        if len(set(names)) != len(names):
            raise ValueError(f"run names must be unique within a bundle, got {names}")
        return self


class Manifest(BaseModel):
    """Reproducibility record written next to every command's outputs; free of timestamps."""
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    command: str
    name: str = ""
    config: dict = Field(default_factory=dict)
    config_sha256: str = ""
    seed: Optional[int] = None
    map_seeds: List[List[int]] = Field(default_factory=list)
    sizes: dict = Field(default_factory=dict)
    inputs: dict = Field(default_factory=dict, description="name -> sha256 of every file read")
    outputs: dict = Field(default_factory=dict, description="name -> sha256 of every file written")
    results: dict = Field(default_factory=dict)
