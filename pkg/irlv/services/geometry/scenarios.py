# irlv/services/geometry/scenarios.py
"""
Verification geometries: the ring around a single AP and the urban crossroads.

Every method takes one point (``Position`` or a length-2 sequence) or an
``(n, 2)`` array. Single points give scalars back, arrays give arrays.
"""
from __future__ import annotations

import math
from typing import Annotated, List, Literal, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from irlv.core.exceptions import DataException, GeometryException
from irlv.core.logger import get_logger
from irlv.enums import ErrorCodeEnum, LosRule, LosState, RegionLabel

logger = get_logger(__name__)

# 边界判定的相对容差
_REL_TOL = 1e-9


class Position(BaseModel):
    model_config = ConfigDict(frozen=True)

    x: float = Field(..., allow_inf_nan=False, description="east coordinate in meters")
    y: float = Field(..., allow_inf_nan=False, description="north coordinate in meters")

    @model_validator(mode="before")
    @classmethod
    def _accept_pairs(cls, data):
        # YAML 中允许直接写成 [x, y]
        if isinstance(data, (list, tuple)) and len(data) == 2:
            return {"x": data[0], "y": data[1]}
        return data

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    @classmethod
    def from_array(cls, xy: Sequence[float]) -> "Position":
        return cls(x=float(xy[0]), y=float(xy[1]))


PointLike = Union[Position, Sequence[float], np.ndarray]


def as_points(points: PointLike) -> Tuple[np.ndarray, bool]:
    """Normalize the input to an (n, 2) float array; the flag says whether a single point was given."""
    if isinstance(points, Position):
        return points.as_array()[None, :], True
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], Position):
        return np.array([p.as_array() for p in points]), False
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1 and arr.shape[0] == 2:
        return arr[None, :], True
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"expected points of shape (n, 2), got {arr.shape}")
    return arr, False


def _unwrap(values: np.ndarray, single: bool):
    if single:
        value = values[0]
        return value.item() if isinstance(value, np.generic) else value
    return values


class Scenario(BaseModel):
    """Shared behaviour of all geometries; subclasses provide the region predicates."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    # --- 子类实现 ---
    @property
    def ap_positions(self) -> np.ndarray:
        raise NotImplementedError

    @property
    def ap_heights(self) -> np.ndarray:
        raise NotImplementedError

    def area_measure(self, region: Optional[RegionLabel] = None) -> float:
        raise NotImplementedError

    def bounding_box(self) -> Tuple[float, float, float, float]:
        raise NotImplementedError

    def _in_area(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _in_roi(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _signed_distance(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _sample(self, region: Optional[RegionLabel], rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def los_matrix(self, points: PointLike) -> np.ndarray:
        """(n, n_ap) boolean matrix, True where the link is LOS."""
        raise NotImplementedError

    def project_to_area(self, points: PointLike) -> np.ndarray:
        raise NotImplementedError

    # --- 公共接口 ---
    @property
    def n_aps(self) -> int:
        return int(self.ap_positions.shape[0])

    def area_diagonal(self) -> float:
        x0, y0, x1, y1 = self.bounding_box()
        return float(math.hypot(x1 - x0, y1 - y0))

    def in_area(self, points: PointLike):
        pts, single = as_points(points)
        return _unwrap(self._in_area(pts), single)

    def _require_in_area(self, pts: np.ndarray) -> None:
        inside = self._in_area(pts)
        if not np.all(inside):
            bad = pts[~inside]
            raise GeometryException(
                ErrorCodeEnum.OUTSIDE_AREA,
                message=f"{len(bad)} point(s) outside the service area, first at {bad[0].tolist()}",
                extra={"count": int(len(bad))},
            )

    def contains_roi(self, points: PointLike):
        pts, single = as_points(points)
        self._require_in_area(pts)
        return _unwrap(self._in_roi(pts), single)

    def labels(self, points: PointLike) -> np.ndarray:
        """Region labels in {-1, +1} for an array of points inside the area."""
        pts, _ = as_points(points)
        self._require_in_area(pts)
        return np.where(self._in_roi(pts), int(RegionLabel.H0), int(RegionLabel.H1)).astype(int)

    def signed_border_distance(self, points: PointLike):
        pts, single = as_points(points)
        self._require_in_area(pts)
        return _unwrap(self._signed_distance(pts), single)

    def sample_uniform(self, region: Optional[RegionLabel], rng: np.random.Generator, n: Optional[int] = None):
        """
        Uniform positions over A0 (H0), A1 (H1) or the whole area (None).
        Without ``n`` a single Position is returned.
        """
        count = 1 if n is None else int(n)
        if count < 0:
            raise ValueError("n must be non-negative")
        if self.area_measure(region) <= 0:
            raise GeometryException(ErrorCodeEnum.INVALID_LAYOUT, message=f"region {region} has zero area")
        pts = self._sample(region, rng, count)
        if n is None:
            return Position.from_array(pts[0])
        return pts

    def los_state(self, ue: PointLike, ap_index: int):
        if not 0 <= ap_index < self.n_aps:
            raise GeometryException(ErrorCodeEnum.INVALID_LAYOUT, message=f"no AP with index {ap_index}")
        pts, single = as_points(ue)
        los = self.los_matrix(pts)[:, ap_index]
        states = [LosState.LOS if v else LosState.NLOS for v in los]
        return states[0] if single else states

    def distances_to_aps(self, points: PointLike) -> np.ndarray:
        """(n, n_ap) horizontal distances between points and APs."""
        pts, _ = as_points(points)
        diff = pts[:, None, :] - self.ap_positions[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])


# =====================================================================
#   环形场景: 单个 AP 位于圆心
# =====================================================================
class RingScenario(Scenario):
    kind: Literal["ring"] = "ring"
    r_min: float = Field(0.1, gt=0, description="inner radius of both A and A0")
    r_in: float = Field(2.0, gt=0, description="outer radius of the ROI")
    r_out: float = Field(10.0, gt=0, description="outer radius of the area")
    ap: Position = Field(default_factory=lambda: Position(x=0.0, y=0.0))
    h_ap: float = Field(15.0, gt=0)

    @model_validator(mode="after")
    def _check_radii(self):
        if not self.r_min < self.r_in < self.r_out:
            raise ValueError(f"ring radii must satisfy r_min < r_in < r_out, got {self.r_min}, {self.r_in}, {self.r_out}")
        return self

    @property
    def delta0(self) -> float:
        return self.r_in ** 2 - self.r_min ** 2

    @property
    def delta1(self) -> float:
        return self.r_out ** 2 - self.r_in ** 2

    @property
    def ap_positions(self) -> np.ndarray:
        return self.ap.as_array()[None, :]

    @property
    def ap_heights(self) -> np.ndarray:
        return np.array([self.h_ap])

    def _radial_bounds(self, region: Optional[RegionLabel]) -> Tuple[float, float]:
        if region is None:
            return self.r_min, self.r_out
        if RegionLabel(region) is RegionLabel.H0:
            return self.r_min, self.r_in
        return self.r_in, self.r_out

    def area_measure(self, region: Optional[RegionLabel] = None) -> float:
        r0, r1 = self._radial_bounds(region)
        return math.pi * (r1 ** 2 - r0 ** 2)

    def bounding_box(self) -> Tuple[float, float, float, float]:
        return (self.ap.x - self.r_out, self.ap.y - self.r_out, self.ap.x + self.r_out, self.ap.y + self.r_out)

    def radii(self, pts: np.ndarray) -> np.ndarray:
        return np.hypot(pts[:, 0] - self.ap.x, pts[:, 1] - self.ap.y)

    def _in_area(self, pts):
        r = self.radii(pts)
        tol = _REL_TOL * self.r_out
        return (r >= self.r_min - tol) & (r <= self.r_out + tol)

    def _in_roi(self, pts):
        return self.radii(pts) <= self.r_in

    def _signed_distance(self, pts):
        r = self.radii(pts)
        d = np.abs(r - self.r_in)
        return np.where(r <= self.r_in, -d, d)

    def _sample(self, region, rng, n):
        r0, r1 = self._radial_bounds(region)
        r = np.sqrt(rng.uniform(r0 ** 2, r1 ** 2, n))
        theta = rng.uniform(0.0, 2.0 * math.pi, n)
        return np.column_stack([self.ap.x + r * np.cos(theta), self.ap.y + r * np.sin(theta)])

    def los_matrix(self, points):
        pts, _ = as_points(points)
        return np.ones((pts.shape[0], 1), dtype=bool)

    def project_to_area(self, points):
        pts, _ = as_points(points)
        rel = pts - self.ap.as_array()
        r = np.hypot(rel[:, 0], rel[:, 1])
        # 圆心处方向不定, 取 +x
        unit = np.where(r[:, None] > 0, rel / np.where(r > 0, r, 1.0)[:, None], np.array([1.0, 0.0]))
        r_clipped = np.clip(r, self.r_min, self.r_out)
        return self.ap.as_array() + unit * r_clipped[:, None]


# =====================================================================
#   城市场景: 十字路口 + 建筑, ROI 为矩形
# =====================================================================
class StreetStrip(BaseModel):
    """Axis-aligned street; ``axis="x"`` runs east-west with its center line at y = center."""
    model_config = ConfigDict(frozen=True)

    axis: Literal["x", "y"]
    center: float
    width: float = Field(..., gt=0)

    @property
    def dim(self) -> int:
        # 约束作用的坐标: 东西向街道约束 y
        return 1 if self.axis == "x" else 0

    def contains(self, pts: np.ndarray) -> np.ndarray:
        return np.abs(pts[:, self.dim] - self.center) <= self.width / 2.0


class RoiRect(BaseModel):
    model_config = ConfigDict(frozen=True)

    d1: float = Field(50.0, ge=0, description="x offset of the ROI from the south-west corner")
    d2: float = Field(50.0, ge=0, description="y offset of the ROI from the south-west corner")
    beta1: float = Field(150.0, gt=0, description="ROI extent along x")
    beta2: float = Field(150.0, gt=0, description="ROI extent along y")

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        return self.d1, self.d2, self.d1 + self.beta1, self.d2 + self.beta2

    @property
    def area(self) -> float:
        return self.beta1 * self.beta2

    def contains(self, pts: np.ndarray) -> np.ndarray:
        x0, y0, x1, y1 = self.bounds
        return (pts[:, 0] >= x0) & (pts[:, 0] <= x1) & (pts[:, 1] >= y0) & (pts[:, 1] <= y1)

    def signed_distance(self, pts: np.ndarray) -> np.ndarray:
        x0, y0, x1, y1 = self.bounds
        dx = np.maximum(np.maximum(x0 - pts[:, 0], pts[:, 0] - x1), 0.0)
        dy = np.maximum(np.maximum(y0 - pts[:, 1], pts[:, 1] - y1), 0.0)
        outside = np.hypot(dx, dy)
        depth = np.minimum.reduce([pts[:, 0] - x0, x1 - pts[:, 0], pts[:, 1] - y0, y1 - pts[:, 1]])
        return np.where(self.contains(pts), -depth, outside)


class AccessPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    position: Position
    h_ap: float = Field(15.0, gt=0, description="antenna height in meters")

    @model_validator(mode="before")
    @classmethod
    def _accept_pairs(cls, data):
        if isinstance(data, (list, tuple)):
            return {"position": data}
        return data


# 默认布局: 两个 255 m 的街区, 30 m 宽的街道
DEFAULT_BLOCK_M = 255.0
DEFAULT_STREET_WIDTH_M = 30.0


def default_street_layout(block: float = DEFAULT_BLOCK_M, street_width: float = DEFAULT_STREET_WIDTH_M):
    side = 2.0 * block + street_width
    c = block + street_width / 2.0
    streets = [StreetStrip(axis="x", center=c, width=street_width), StreetStrip(axis="y", center=c, width=street_width)]
    # 顺序: 路口, 四个街道尽头, 四个街道中点, 两个远端
    edge = 5.0
    coords = [
        (c, c),
        (c, edge), (c, side - edge), (edge, c), (side - edge, c),
        (c, block / 2.0), (c, side - block / 2.0), (block / 2.0, c), (side - block / 2.0, c),
        (c, side - 70.0), (side - 70.0, c),
    ]
    return side, streets, coords


def _default_aps(n_aps: Optional[int] = None, h_ap: float = 15.0) -> List[dict]:
    _, _, coords = default_street_layout()
    if n_aps is not None and not 1 <= n_aps <= len(coords):
        raise ValueError(f"default layout has between 1 and {len(coords)} APs, got n_aps={n_aps}")
    return [{"position": list(xy), "h_ap": h_ap} for xy in coords[:n_aps]]


class UrbanScenario(Scenario):
    kind: Literal["urban"] = "urban"
    side: float = Field(default_factory=lambda: default_street_layout()[0], gt=0, description="side of the square area")
    streets: List[StreetStrip] = Field(default_factory=lambda: list(default_street_layout()[1]))
    roi: RoiRect = Field(default_factory=RoiRect)
    aps: List[AccessPoint] = Field(default_factory=lambda: [AccessPoint(**ap) for ap in _default_aps()], min_length=1)
    los_rule: LosRule = LosRule.SEGMENT

    @model_validator(mode="before")
    @classmethod
    def _expand_n_aps(cls, data):
        # n_aps 只是默认布局的简写, 不作为字段保存
        if isinstance(data, dict) and "n_aps" in data:
            data = dict(data)
            n_aps = data.pop("n_aps")
            if "aps" in data:
                raise ValueError("give either aps or n_aps, not both")
            data["aps"] = _default_aps(int(n_aps), float(data.pop("h_ap", 15.0)))
        return data

    @model_validator(mode="after")
    def _check_layout(self):
        x0, y0, x1, y1 = self.roi.bounds
        if x1 > self.side or y1 > self.side:
            raise ValueError(f"ROI {self.roi.bounds} exceeds the area side {self.side}")
        for i, ap in enumerate(self.aps):
            if not (0 <= ap.position.x <= self.side and 0 <= ap.position.y <= self.side):
                raise ValueError(f"AP {i + 1} at {ap.position} lies outside the area")
        seen = {}
        for i, ap in enumerate(self.aps):
            key = (ap.position.x, ap.position.y)
            if key in seen:
                logger.warning(f"⚠️ AP {i + 1} duplicates the coordinates of AP {seen[key] + 1}: {list(key)}")
            else:
                seen[key] = i
        return self

    @property
    def ap_positions(self) -> np.ndarray:
        return np.array([ap.position.as_array() for ap in self.aps])

    @property
    def ap_heights(self) -> np.ndarray:
        return np.array([ap.h_ap for ap in self.aps])

    def area_measure(self, region: Optional[RegionLabel] = None) -> float:
        total = self.side ** 2
        if region is None:
            return total
        if RegionLabel(region) is RegionLabel.H0:
            return self.roi.area
        return total - self.roi.area

    def bounding_box(self) -> Tuple[float, float, float, float]:
        return 0.0, 0.0, self.side, self.side

    def _in_area(self, pts):
        tol = _REL_TOL * self.side
        return np.all((pts >= -tol) & (pts <= self.side + tol), axis=1)

    def _in_roi(self, pts):
        return self.roi.contains(pts)

    def _signed_distance(self, pts):
        return self.roi.signed_distance(pts)

    def _sample(self, region, rng, n):
        if region is not None and RegionLabel(region) is RegionLabel.H0:
            x0, y0, x1, y1 = self.roi.bounds
            return np.column_stack([rng.uniform(x0, x1, n), rng.uniform(y0, y1, n)])
        if region is None:
            return rng.uniform(0.0, self.side, (n, 2))
        # A1: 拒绝采样
        accept = self.area_measure(RegionLabel.H1) / self.area_measure()
        chunks, have = [], 0
        while have < n:
            draw = rng.uniform(0.0, self.side, (int((n - have) / accept * 1.2) + 8, 2))
            kept = draw[~self.roi.contains(draw)]
            chunks.append(kept)
            have += len(kept)
        return np.concatenate(chunks)[:n]

    def on_street(self, points: PointLike) -> np.ndarray:
        pts, _ = as_points(points)
        mask = np.zeros(pts.shape[0], dtype=bool)
        for street in self.streets:
            mask |= street.contains(pts)
        return mask

    def _segment_within_streets(self, pts: np.ndarray, ap: np.ndarray) -> np.ndarray:
        """True where the segment from each point to the AP is covered by the union of street strips."""
        n = pts.shape[0]
        if not self.streets:
            return np.zeros(n, dtype=bool)
        starts, ends = [], []
        for street in self.streets:
            p = pts[:, street.dim]
            du = ap[street.dim] - p
            lo = street.center - street.width / 2.0
            hi = street.center + street.width / 2.0
            with np.errstate(divide="ignore", invalid="ignore"):
                t_a = (lo - p) / du
                t_b = (hi - p) / du
            t0 = np.clip(np.minimum(t_a, t_b), 0.0, 1.0)
            t1 = np.clip(np.maximum(t_a, t_b), 0.0, 1.0)
            # 与条带平行的线段: 要么全部在内, 要么全部在外
            parallel = du == 0
            inside = (p >= lo) & (p <= hi)
            t0 = np.where(parallel, np.where(inside, 0.0, 1.0), t0)
            t1 = np.where(parallel, np.where(inside, 1.0, 0.0), t1)
            empty = t1 < t0
            starts.append(np.where(empty, 2.0, t0))
            ends.append(np.where(empty, -1.0, t1))
        starts = np.array(starts)
        ends = np.array(ends)
        # 区间并集覆盖 [0, 1]: 每轮至少延伸一个区间
        reach = np.zeros(n)
        eps = 1e-12
        for _ in range(len(self.streets)):
            for s, e in zip(starts, ends):
                reach = np.where(s <= reach + eps, np.maximum(reach, e), reach)
        return reach >= 1.0 - eps

    def los_matrix(self, points):
        pts, _ = as_points(points)
        n = pts.shape[0]
        if self.los_rule is LosRule.ALWAYS_LOS:
            return np.ones((n, self.n_aps), dtype=bool)
        if self.los_rule is LosRule.ALWAYS_NLOS:
            return np.zeros((n, self.n_aps), dtype=bool)
        ue_on_street = self.on_street(pts)
        if self.los_rule is LosRule.STREET:
            return np.repeat(ue_on_street[:, None], self.n_aps, axis=1)
        aps = self.ap_positions
        ap_on_street = self.on_street(aps)
        out = np.zeros((n, self.n_aps), dtype=bool)
        for j in range(self.n_aps):
            if not ap_on_street[j]:
                continue
            out[:, j] = ue_on_street & self._segment_within_streets(pts, aps[j])
        return out

    def project_to_area(self, points):
        pts, _ = as_points(points)
        return np.clip(pts, 0.0, self.side)


ScenarioConfig = Annotated[Union[RingScenario, UrbanScenario], Field(discriminator="kind")]


# ---------------------------------------------------------------------
#   预置布局
# ---------------------------------------------------------------------
def default_urban_scenario(n_aps: int = 11, d1: float = 50.0, d2: float = 50.0, beta1: float = 150.0,
                           beta2: float = 150.0, h_ap: float = 15.0,
                           los_rule: LosRule = LosRule.SEGMENT) -> UrbanScenario:
    return UrbanScenario(
        n_aps=n_aps, h_ap=h_ap, roi=RoiRect(d1=d1, d2=d2, beta1=beta1, beta2=beta2), los_rule=los_rule,
    )


def alternative_roi_scenario(n_aps: int = 10) -> UrbanScenario:
    """ROI shifted north so that it covers part of the east-west street and one AP."""
    return default_urban_scenario(n_aps=n_aps, d1=100.0, d2=225.0)


MEASUREMENT_AREA_SIDE_M = 4500.0
MEASUREMENT_AP_COORDS = [
    (2500, 2500), (500, 4000), (4000, 4000), (500, 500), (4000, 500),
    (100, 4500), (1000, 400), (4000, 500), (4300, 4000), (4500, 500),
]


def measurement_campaign_scenario() -> UrbanScenario:
    """4500 m square with ten measured AP positions; one AP coordinate appears twice."""
    return UrbanScenario(
        side=MEASUREMENT_AREA_SIDE_M,
        streets=[],
        roi=RoiRect(d1=3000.0, d2=1500.0, beta1=1000.0, beta2=1000.0),
        aps=[{"position": list(xy)} for xy in MEASUREMENT_AP_COORDS],
        los_rule=LosRule.ALWAYS_NLOS,
    )


# ---------------------------------------------------------------------
#   函数式入口
# ---------------------------------------------------------------------
def contains_roi(scenario: Scenario, p: PointLike):
    return scenario.contains_roi(p)


def sample_uniform(scenario: Scenario, region: Optional[RegionLabel], rng: np.random.Generator,
                   n: Optional[int] = None):
    return scenario.sample_uniform(region, rng, n)


def signed_border_distance(scenario: Scenario, p: PointLike):
    return scenario.signed_border_distance(p)


def los_state(scenario: Scenario, ue: PointLike, ap_index: int):
    return scenario.los_state(ue, ap_index)
