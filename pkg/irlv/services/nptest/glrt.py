# irlv/services/nptest/glrt.py
from typing import Callable, Optional

import numpy as np
from scipy.stats import gaussian_kde

from irlv.core.exceptions import DataException
from irlv.enums import ErrorCodeEnum, RegionLabel
from irlv.schemas.nptest import LlrModel
from irlv.services.channel.path_loss import linear_to_db
from irlv.services.nptest.llr import ring_log_density

_LOG_DB_JACOBIAN = np.log(10.0 / np.log(10.0))


def glrt_score(density_h0: Callable[[np.ndarray], np.ndarray], a):
    """p(a|H0) evaluated by the supplied density."""
    return density_h0(a)


def glrt_decide(p_h0, Lambda: float):
    """-1 iff p(a|H0) >= Lambda."""
    decisions = np.where(np.asarray(p_h0, dtype=float) >= Lambda, -1, 1)
    return int(decisions) if np.ndim(p_h0) == 0 else decisions


def ring_density_h0(model: LlrModel) -> Callable[[np.ndarray], np.ndarray]:
    """Closed-form p(a|H0) of the ring, linear attenuation domain."""
    return lambda a: np.exp(ring_log_density(model, a, RegionLabel.H0))


class KdeDensity:
    """
    Gaussian kernel density of H0 attenuations fitted in dB and reported as a
    density of the linear attenuation vector.
    """

    def __init__(self, a_h0: np.ndarray, max_points: int = 2000, rng: Optional[np.random.Generator] = None,
                 bw_method=None):
        a_h0 = np.asarray(a_h0, dtype=float)
        if a_h0.ndim == 1:
            a_h0 = a_h0[:, None]
        if a_h0.shape[0] < 2:
            raise DataException(ErrorCodeEnum.EMPTY_CLASS, "a kernel density needs at least two H0 samples")
        if a_h0.shape[0] > max_points:
            rng = rng or np.random.default_rng(0)
            a_h0 = a_h0[rng.choice(a_h0.shape[0], size=max_points, replace=False)]
        self.n_features = a_h0.shape[1]
        self.kde = gaussian_kde(linear_to_db(a_h0).T, bw_method=bw_method)

    def log_density(self, a) -> np.ndarray:
        arr = np.asarray(a, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None] if self.n_features == 1 else arr[None, :]
        if arr.shape[1] != self.n_features:
            raise DataException(
                ErrorCodeEnum.DIMENSION_MISMATCH, f"expected {self.n_features} features, got {arr.shape[1]}",
            )
        # dB 到线性域的雅可比: prod 10 / (a ln 10)
        jac = self.n_features * _LOG_DB_JACOBIAN - np.sum(np.log(arr), axis=1)
        return self.kde.logpdf(linear_to_db(arr).T) + jac

    def __call__(self, a) -> np.ndarray:
        return np.exp(self.log_density(a))
