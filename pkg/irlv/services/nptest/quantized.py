# irlv/services/nptest/quantized.py
from dataclasses import dataclass

import numpy as np
import pandas as pd

from irlv.core.exceptions import DataException
from irlv.enums import ErrorCodeEnum
from irlv.services.channel.path_loss import linear_to_db


@dataclass(frozen=True)
class QuantizedPdfPair:
    """Histogram estimates of p(a|H0) and p(a|H1) over a uniform dB quantizer."""
    edges: np.ndarray
    p_h0: np.ndarray
    p_h1: np.ndarray
    pseudo_count: float = 1.0

    @property
    def n_levels(self) -> int:
        return len(self.p_h0)

    def bin_index(self, a) -> np.ndarray:
        """Quantizer cell of each attenuation; values beyond the edges go to the end cells."""
        x_db = linear_to_db(_scalar_feature(a))
        idx = np.searchsorted(self.edges, x_db, side="right") - 1
        return np.clip(idx, 0, self.n_levels - 1)

    def llr(self, a):
        idx = self.bin_index(a)
        values = np.log(self.p_h0[idx]) - np.log(self.p_h1[idx])
        return float(values[0]) if np.ndim(a) == 0 else values

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "lo_db": self.edges[:-1],
            "hi_db": self.edges[1:],
            "p_h0": self.p_h0,
            "p_h1": self.p_h1,
        })


def _scalar_feature(a) -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise DataException(
                ErrorCodeEnum.DIMENSION_MISMATCH,
                f"the quantized test handles a single AP, got {arr.shape[1]} features",
            )
        arr = arr[:, 0]
    return np.atleast_1d(arr)


def fit_quantized_pdfs(train_h0, train_h1, n_levels: int = 300, pseudo_count: float = 1.0) -> QuantizedPdfPair:
    """
    Relative frequencies over n_levels uniform dB cells spanning the pooled
    min/max, with ``pseudo_count`` added to every cell of both classes.
    """
    h0 = linear_to_db(_scalar_feature(train_h0))
    h1 = linear_to_db(_scalar_feature(train_h1))
    if h0.size == 0 or h1.size == 0:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, "both hypotheses need training samples")
    if n_levels < 1:
        raise ValueError("n_levels must be >= 1")
    lo = float(min(h0.min(), h1.min()))
    hi = float(max(h0.max(), h1.max()))
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, n_levels + 1)

    def pmf(x: np.ndarray) -> np.ndarray:
        counts, _ = np.histogram(x, bins=edges)
        counts = counts.astype(float) + pseudo_count
        return counts / counts.sum()

    return QuantizedPdfPair(edges=edges, p_h0=pmf(h0), p_h1=pmf(h1), pseudo_count=pseudo_count)
