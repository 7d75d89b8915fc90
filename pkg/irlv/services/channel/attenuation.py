# irlv/services/channel/attenuation.py
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from irlv.core.exceptions import DataException
from irlv.core.logger import get_logger
from irlv.enums import ErrorCodeEnum, RegionLabel
from irlv.schemas.channel import ChannelParams
from irlv.services.channel.path_loss import db_to_linear, linear_to_db, mean_path_loss_db
from irlv.services.channel.shadowing import ShadowingMap, generate_shadowing_map
from irlv.services.geometry import Position, Scenario, as_points

logger = get_logger(__name__)


@dataclass(frozen=True)
class FeatureVector:
    """One attenuation observation across all APs, linear scale."""
    a: np.ndarray
    label: Optional[int] = None
    position: Optional[Position] = None

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float).reshape(-1)
        if a.size == 0 or not np.all(np.isfinite(a)) or np.any(a <= 0):
            raise DataException(ErrorCodeEnum.NON_FINITE, "attenuations must be finite and strictly positive")
        if self.label is not None and self.label not in (-1, 1):
            raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"label must be -1 or +1, got {self.label}")
        object.__setattr__(self, "a", a)

    @property
    def a_db(self) -> np.ndarray:
        return linear_to_db(self.a)


@dataclass
class AttenuationDataset:
    """Column-aligned arrays: positions (n, 2), linear attenuations (n, n_ap), labels (n,) in {-1, +1}."""
    positions: np.ndarray
    a: np.ndarray
    labels: np.ndarray
    k_f: int = 1

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 2)
        self.a = np.asarray(self.a, dtype=float)
        if self.a.ndim == 1:
            self.a = self.a[:, None]
        self.labels = np.asarray(self.labels, dtype=int).reshape(-1)
        n = self.a.shape[0]
        if self.positions.shape[0] != n or self.labels.shape[0] != n:
            raise DataException(
                ErrorCodeEnum.DIMENSION_MISMATCH,
                f"dataset columns disagree: {self.positions.shape[0]} positions, {n} rows, {self.labels.shape[0]} labels",
            )
        if not np.all(np.isfinite(self.a)) or np.any(self.a <= 0):
            raise DataException(ErrorCodeEnum.NON_FINITE, "attenuations must be finite and strictly positive")
        if not np.all(np.isin(self.labels, (-1, 1))):
            raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, "labels must be -1 or +1")

    def __len__(self) -> int:
        return self.a.shape[0]

    @property
    def n_aps(self) -> int:
        return self.a.shape[1]

    @property
    def a_db(self) -> np.ndarray:
        return linear_to_db(self.a)

    @property
    def raw_draws(self) -> int:
        """Channel draws behind the dataset: one per averaged fading realization."""
        return len(self) * self.k_f

    def subset(self, index) -> "AttenuationDataset":
        return AttenuationDataset(self.positions[index], self.a[index], self.labels[index], self.k_f)

    def of_label(self, label: RegionLabel) -> "AttenuationDataset":
        return self.subset(self.labels == int(label))

    def counts(self) -> dict:
        return {"h0": int(np.sum(self.labels == -1)), "h1": int(np.sum(self.labels == 1))}

    def split(self, fraction: float, rng: np.random.Generator):
        """Random split; the first part holds ``round(fraction * n)`` rows."""
        order = rng.permutation(len(self))
        cut = int(round(fraction * len(self)))
        return self.subset(np.sort(order[:cut])), self.subset(np.sort(order[cut:]))

    def feature_vectors(self) -> List[FeatureVector]:
        return [
            FeatureVector(self.a[i], int(self.labels[i]), Position.from_array(self.positions[i]))
            for i in range(len(self))
        ]

    @classmethod
    def concat(cls, parts: Sequence["AttenuationDataset"]) -> "AttenuationDataset":
        return cls(
            np.concatenate([p.positions for p in parts]),
            np.concatenate([p.a for p in parts]),
            np.concatenate([p.labels for p in parts]),
            parts[0].k_f,
        )


def mean_attenuation_db(scenario: Scenario, params: ChannelParams, shadowing: ShadowingMap, points) -> np.ndarray:
    """Path loss plus frozen shadowing, (n, n_ap) in dB."""
    pts, _ = as_points(points)
    return mean_path_loss_db(scenario, params, pts) + shadowing.values_at(pts)


def draw_attenuations(mean_db: np.ndarray, fading: bool, k_f: int, rng: np.random.Generator) -> np.ndarray:
    """k_f-averaged linear attenuations around the given means; exponential power gain when fading is on."""
    mean_lin = db_to_linear(mean_db)
    if not fading:
        return mean_lin
    # 增益 1/a 服从均值为 10^(-A_dB/10) 的指数分布
    gains = rng.exponential(1.0, size=(k_f,) + mean_db.shape) / mean_lin
    return np.mean(1.0 / gains, axis=0)


def sample_attenuation(scenario: Scenario, params: ChannelParams, shadowing: ShadowingMap, ue,
                       fading: bool, rng: np.random.Generator) -> FeatureVector:
    pts, _ = as_points(ue)
    scenario._require_in_area(pts)
    a = draw_attenuations(mean_attenuation_db(scenario, params, shadowing, pts), fading, 1, rng)[0]
    label = int(scenario.labels(pts)[0])
    return FeatureVector(a=a, label=label, position=Position.from_array(pts[0]))


def average_fading(samples: Sequence[FeatureVector], k_f: int) -> FeatureVector:
    if len(samples) != k_f:
        raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"expected {k_f} samples, got {len(samples)}")
    lengths = {s.a.shape[0] for s in samples}
    if len(lengths) != 1:
        raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"samples have different lengths {sorted(lengths)}")
    positions = {s.position for s in samples if s.position is not None}
    if len(positions) > 1:
        raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, "averaged samples must share one position")
    first = samples[0]
    return FeatureVector(
        a=np.mean([s.a for s in samples], axis=0),
        label=first.label,
        position=next(iter(positions)) if positions else None,
    )


def _region_set(regions: Optional[Iterable[Optional[RegionLabel]]]) -> Optional[RegionLabel]:
    """Both hypotheses (or None) mean the whole area."""
    if regions is None:
        return None
    wanted = {None if r is None else RegionLabel(r) for r in regions}
    if len(wanted) == 1 and None not in wanted:
        return next(iter(wanted))
    return None


def sample_positions(scenario: Scenario, n_points: int, regions, rng: np.random.Generator) -> np.ndarray:
    if n_points < 1:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, f"n_points must be >= 1, got {n_points}")
    return scenario.sample_uniform(_region_set(regions), rng, n_points)


def build_dataset(
    scenario: Scenario,
    params: ChannelParams,
    shadowing: Optional[ShadowingMap],
    n_points: int,
    k_f: int,
    regions,
    rng: np.random.Generator,
    fading: bool = False,
    positions: Optional[np.ndarray] = None,
) -> AttenuationDataset:
    """
    n_points positions, each contributing one k_f-averaged feature vector and its true label.

    Pre-sampled ``positions`` override the sampler (they must lie in the map for
    point-wise shadowing). Without a map, one is generated on these positions.
    """
    if positions is None:
        positions = sample_positions(scenario, n_points, regions, rng)
    pts, _ = as_points(positions)
    if shadowing is None:
        shadowing = generate_shadowing_map(params, pts, rng, n_aps=scenario.n_aps,
                                           bounding_box=scenario.bounding_box())
    labels = scenario.labels(pts)
    a = draw_attenuations(mean_attenuation_db(scenario, params, shadowing, pts), fading, k_f, rng)
    logger.debug(f"Built dataset: {len(pts)} vectors, k_f={k_f}, {len(pts) * k_f} raw draws")
    return AttenuationDataset(positions=pts, a=a, labels=labels, k_f=k_f)
