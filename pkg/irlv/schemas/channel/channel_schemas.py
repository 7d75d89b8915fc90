# irlv/schemas/channel/channel_schemas.py
import math

from pydantic import BaseModel, ConfigDict, Field
from scipy.constants import speed_of_light

from irlv.enums import ShadowingAcrossAps, ShadowingKind


class ChannelParams(BaseModel):
    """Propagation parameters shared by path loss, shadowing and the closed-form tests."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    f: float = Field(2.12e9, gt=0, description="carrier frequency in Hz")
    nu: float = Field(2.0, ge=1, description="LOS path-loss exponent")
    sigma_s_db: float = Field(0.0, ge=0, description="shadowing standard deviation in dB")
    d_c: float = Field(75.0, gt=0, description="shadowing decorrelation distance in meters")
    c: float = Field(speed_of_light, gt=0, description="propagation speed in m/s")
    shadowing: ShadowingKind = Field(ShadowingKind.POINTS, description="how the shadowing field is realized")
    across_aps: ShadowingAcrossAps = Field(
        ShadowingAcrossAps.INDEPENDENT, description="one field per AP or a single field shared by all APs",
    )

    @property
    def wavenumber(self) -> float:
        """4*pi*f/c, the distance scale of the LOS path loss."""
        return 4.0 * math.pi * self.f / self.c

    @property
    def has_shadowing(self) -> bool:
        return self.sigma_s_db > 0 and self.shadowing is not ShadowingKind.NONE


class ChannelSection(ChannelParams):
    """Channel section of a run configuration: parameters plus the observation model."""
    fading: bool = Field(False, description="draw exponential power gains per observation")
    k_f: int = Field(1, ge=1, description="fading realizations averaged into one feature vector")
