# irlv/schemas/learning/learning_schemas.py
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from irlv.enums import Activation


class MlpConfig(BaseModel):
    """
    Fully connected network description.

    ``layer_sizes`` lists every layer from input to output; ``activations`` has
    one entry per weight layer (the input layer is the identity). When
    ``activations`` is omitted every weight layer is a sigmoid, except the
    indices listed in ``linear_layers``.
    """
    model_config = ConfigDict(frozen=True, extra="forbid")

    layer_sizes: List[int] = Field(..., min_length=2, description="[N_in, hidden..., N_out]")
    activations: Optional[List[Activation]] = None
    linear_layers: List[int] = Field(default_factory=list, description="weight layers forced to a linear activation")
    learning_rate: float = Field(0.05, gt=0)
    epochs: int = Field(200, ge=1)
    batch_size: Optional[int] = Field(32, ge=1, description="None trains full batch")
    seed: int = 0

    @model_validator(mode="after")
    def _check(self):
        if any(n < 1 for n in self.layer_sizes):
            raise ValueError(f"layer sizes must be >= 1, got {self.layer_sizes}")
        n_weight_layers = len(self.layer_sizes) - 1
        if self.activations is not None and len(self.activations) != n_weight_layers:
            raise ValueError(
                f"{len(self.activations)} activations given for {n_weight_layers} weight layers"
            )
        bad = [i for i in self.linear_layers if not 0 <= i < n_weight_layers]
        if bad:
            raise ValueError(f"linear_layers {bad} out of range for {n_weight_layers} weight layers")
        return self

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    def activation_schedule(self) -> List[Activation]:
        if self.activations is not None:
            return list(self.activations)
        return [
            Activation.LINEAR if i in self.linear_layers else Activation.SIGMOID
            for i in range(len(self.layer_sizes) - 1)
        ]


def classifier_config(n_inputs: int, hidden: Optional[List[int]] = None, **overrides) -> MlpConfig:
    """Two-class network: sigmoid hidden layers and one sigmoid output."""
    hidden = [5, 5] if hidden is None else list(hidden)
    return MlpConfig(layer_sizes=[n_inputs, *hidden, 1], **overrides)


def autoencoder_config(n_inputs: int, hidden: Optional[List[int]] = None, **overrides) -> MlpConfig:
    """
    Autoencoder with the code layer in the middle; the weight layer producing
    the code is linear.
    """
    if hidden is None:
        code = max(1, min(2, n_inputs - 1))
        hidden = [7, 6, 3, code, 3, 6, 7]
    hidden = list(hidden)
    sizes = [n_inputs, *hidden, n_inputs]
    centre = len(hidden) // 2
    overrides.setdefault("linear_layers", [centre])
    return MlpConfig(layer_sizes=sizes, **overrides)


class KernelConfig(BaseModel):
    """Gaussian kernel exp(-|x - y|^2 / (2 gamma_k^2)) with regularization C."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: str = Field("gaussian", pattern="^gaussian$")
    gamma_k: Optional[float] = Field(None, gt=0, description="bandwidth; None uses the median pairwise distance")
    C: float = Field(10.0, gt=0)
    max_train: int = Field(20000, ge=2, description="training vectors kept before subsampling")
    ridge: float = Field(1e-10, gt=0, description="diagonal fallback relative to trace / S")
    median_sample: int = Field(2000, ge=2, description="vectors used by the median heuristic")
    seed: int = 0
