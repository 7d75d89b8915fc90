# irlv/services/learning/preprocessing.py
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from irlv.core.exceptions import DataException
from irlv.enums import ErrorCodeEnum, ScalerKind
from irlv.services.channel import AttenuationDataset, FeatureVector
from irlv.services.channel.path_loss import linear_to_db

Features = Union[np.ndarray, FeatureVector, AttenuationDataset]


def feature_matrix(a: Features, n_features: Optional[int] = None) -> np.ndarray:
    """Linear attenuations as an (n, n_features) matrix."""
    if isinstance(a, AttenuationDataset):
        arr = a.a
    elif isinstance(a, FeatureVector):
        arr = a.a[None, :]
    else:
        arr = np.asarray(a, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr[:, None] if n_features == 1 else arr[None, :]
    if n_features is not None and arr.shape[1] != n_features:
        raise DataException(
            ErrorCodeEnum.DIMENSION_MISMATCH, f"expected {n_features} features, got {arr.shape[1]}",
        )
    return arr


@dataclass(frozen=True)
class FeatureScaler:
    """
    Maps linear attenuations to the network / kernel input space:
    ``(dB - shift) / scale`` per feature, statistics taken from training data.
    """
    kind: ScalerKind
    shift: np.ndarray
    scale: np.ndarray
    in_db: bool = True

    @classmethod
    def identity(cls, n_features: int) -> "FeatureScaler":
        return cls(ScalerKind.IDENTITY, np.zeros(n_features), np.ones(n_features), in_db=False)

    @classmethod
    def fit(cls, a: Features, kind: ScalerKind) -> "FeatureScaler":
        x = linear_to_db(feature_matrix(a))
        if kind is ScalerKind.ZSCORE:
            shift, scale = x.mean(axis=0), x.std(axis=0)
        elif kind is ScalerKind.MINMAX:
            shift, scale = x.min(axis=0), x.max(axis=0) - x.min(axis=0)
        else:
            return cls.identity(x.shape[1])
        # 常数特征: 保持 scale = 1
        scale = np.where(scale > 0, scale, 1.0)
        if kind is ScalerKind.MINMAX:
            # 常数列居中到 0.5, sigmoid 输出层恰好可以重建
            flat = x.max(axis=0) == x.min(axis=0)
            shift = np.where(flat, shift - 0.5, shift)
        return cls(kind, shift, scale)

    @property
    def n_features(self) -> int:
        return self.shift.shape[0]

    def transform(self, a: Features) -> np.ndarray:
        x = feature_matrix(a, self.n_features)
        if self.in_db:
            x = linear_to_db(x)
        return (x - self.shift) / self.scale


def is_single(a: Features, n_features: int) -> bool:
    """True when ``a`` holds one feature vector rather than a batch."""
    if isinstance(a, FeatureVector):
        return True
    if isinstance(a, AttenuationDataset):
        return False
    ndim = np.ndim(a)
    return ndim == 0 or (ndim == 1 and n_features > 1)
