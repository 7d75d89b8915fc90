from irlv.schemas.nptest import LlrModel

from .glrt import KdeDensity, glrt_decide, glrt_score, ring_density_h0
from .llr import (
    closed_form_variant,
    fading_log_density,
    find_llr_crossing,
    llr_fading,
    llr_fading_nu2,
    llr_fading_nu3,
    llr_function,
    llr_numeric_oracle,
    llr_shadowing,
    noiseless_decide,
    np_decide,
    numeric_log_density,
    ring_log_density,
    shadowing_log_density,
)
from .quantized import QuantizedPdfPair, fit_quantized_pdfs
from .special import erf, inc_gamma_upper

__all__ = [
    "KdeDensity",
    "LlrModel",
    "QuantizedPdfPair",
    "closed_form_variant",
    "erf",
    "fading_log_density",
    "find_llr_crossing",
    "fit_quantized_pdfs",
    "glrt_decide",
    "glrt_score",
    "inc_gamma_upper",
    "llr_fading",
    "llr_fading_nu2",
    "llr_fading_nu3",
    "llr_function",
    "llr_numeric_oracle",
    "llr_shadowing",
    "noiseless_decide",
    "np_decide",
    "numeric_log_density",
    "ring_density_h0",
    "ring_log_density",
    "shadowing_log_density",
]
