# irlv/schemas/nptest/llr_schemas.py
import math

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.constants import speed_of_light

from irlv.enums import LlrVariant


class LlrModel(BaseModel):
    """Single-AP ring problem for which the likelihoods are known in closed form."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    variant: LlrVariant = LlrVariant.NUMERIC_ORACLE
    r_min: float = Field(0.1, gt=0)
    r_in: float = Field(2.0, gt=0)
    r_out: float = Field(10.0, gt=0)
    f: float = Field(2.12e9, gt=0)
    nu: float = Field(2.0, ge=1)
    sigma_s_db: float = Field(0.0, ge=0)
    c: float = Field(speed_of_light, gt=0)
    fading: bool = Field(True, description="exponential power gain (True) or log-normal shadowing (False)")

    @model_validator(mode="after")
    def _check(self):
        if not self.r_min < self.r_in < self.r_out:
            raise ValueError(f"ring radii must satisfy r_min < r_in < r_out, got {self.r_min}, {self.r_in}, {self.r_out}")
        if self.variant is LlrVariant.FADING_NU2 and self.nu != 2:
            raise ValueError("fading-nu2 needs nu = 2")
        if self.variant is LlrVariant.FADING_NU3 and self.nu != 3:
            raise ValueError("fading-nu3 needs nu = 3")
        if self.variant in (LlrVariant.FADING_NU2, LlrVariant.FADING_NU3, LlrVariant.FADING) and not self.fading:
            raise ValueError(f"{self.variant.value} describes the fading channel")
        if self.variant is LlrVariant.SHADOWING_UNCORR and self.fading:
            raise ValueError("shadowing-uncorr describes the channel without fading")
        return self

    @classmethod
    def from_ring(cls, scenario, params, variant: LlrVariant, fading: bool) -> "LlrModel":
        return cls(
            variant=variant, r_min=scenario.r_min, r_in=scenario.r_in, r_out=scenario.r_out,
            f=params.f, nu=params.nu, sigma_s_db=params.sigma_s_db, c=params.c, fading=fading,
        )

    @property
    def wavenumber(self) -> float:
        return 4.0 * math.pi * self.f / self.c

    @property
    def delta0(self) -> float:
        return self.r_in ** 2 - self.r_min ** 2

    @property
    def delta1(self) -> float:
        return self.r_out ** 2 - self.r_in ** 2

    @property
    def fading_shape(self) -> float:
        return 1.0 + 2.0 / self.nu
