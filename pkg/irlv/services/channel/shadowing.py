# irlv/services/channel/shadowing.py
"""
Log-normal shadowing fields, frozen once per experiment repetition.

Values are in dB with covariance sigma^2 exp(-distance / d_c) between two
positions. Small position sets are factorized exactly; large ones are drawn
on a regular grid by circulant embedding and read back by bilinear
interpolation.
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.fft import fft2
from scipy.interpolate import RegularGridInterpolator
from scipy.linalg import LinAlgError
from scipy.spatial.distance import cdist

from irlv.config.config_settings.config_schema import ShadowingSolverConfig
from irlv.core.exceptions import ChannelException
from irlv.core.logger import get_logger
from irlv.enums import ErrorCodeEnum, ShadowingAcrossAps, ShadowingKind
from irlv.schemas.channel import ChannelParams
from irlv.services.geometry import as_points
from irlv.utils.linalg_utils import jittered_cho_factor

logger = get_logger(__name__)


@dataclass(frozen=True)
class ShadowingMap:
    kind: ShadowingKind
    sigma_db: float
    d_c: float
    n_aps: int
    # points / uncorrelated: (m, 2) 位置与 (m, n_ap) 取值
    positions: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    # grid: 坐标轴与 (nx, ny, n_ap) 取值
    grid_axes: Optional[Tuple[np.ndarray, np.ndarray]] = None
    grid_values: Optional[np.ndarray] = None
    jitter: float = 0.0
    _index: Dict[bytes, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.positions is not None:
            for i, row in enumerate(np.ascontiguousarray(self.positions)):
                self._index.setdefault(row.tobytes(), i)

    @property
    def covariance_descriptor(self) -> dict:
        return {"model": "exponential", "sigma_db": self.sigma_db, "d_c": self.d_c, "kind": self.kind.value}

    def values_at(self, points) -> np.ndarray:
        """(n, n_ap) shadowing in dB at the requested positions."""
        pts, _ = as_points(points)
        if self.kind is ShadowingKind.NONE:
            return np.zeros((pts.shape[0], self.n_aps))
        if self.kind is ShadowingKind.GRID:
            xs, ys = self.grid_axes
            inside = (
                (pts[:, 0] >= xs[0]) & (pts[:, 0] <= xs[-1]) & (pts[:, 1] >= ys[0]) & (pts[:, 1] <= ys[-1])
            )
            if not np.all(inside):
                raise ChannelException(
                    ErrorCodeEnum.POSITION_NOT_IN_MAP,
                    message=f"{int(np.sum(~inside))} position(s) fall outside the shadowing grid",
                )
            out = np.empty((pts.shape[0], self.n_aps))
            for j in range(self.n_aps):
                interp = RegularGridInterpolator((xs, ys), self.grid_values[:, :, j], method="linear")
                out[:, j] = interp(pts)
            return out
        rows = np.ascontiguousarray(pts)
        idx = np.array([self._index.get(row.tobytes(), -1) for row in rows], dtype=int)
        if np.any(idx < 0):
            missing = rows[idx < 0][0].tolist()
            raise ChannelException(
                ErrorCodeEnum.POSITION_NOT_IN_MAP,
                message=f"{int(np.sum(idx < 0))} position(s) were not part of the map, first {missing}",
            )
        return self.values[idx]


def exponential_covariance(positions: np.ndarray, sigma_db: float, d_c: float) -> np.ndarray:
    return sigma_db ** 2 * np.exp(-cdist(positions, positions) / d_c)


def _field_count(params: ChannelParams, n_aps: int) -> int:
    return 1 if params.across_aps is ShadowingAcrossAps.SHARED else n_aps


def _tile_fields(fields: np.ndarray, n_aps: int) -> np.ndarray:
    # 共享模式下同一个场复用到所有 AP
    if fields.shape[-1] == n_aps:
        return fields
    return np.repeat(fields, n_aps, axis=-1)


def _exact_fields(params: ChannelParams, pts: np.ndarray, n_fields: int, rng: np.random.Generator,
                  solver: ShadowingSolverConfig) -> Tuple[np.ndarray, float]:
    sigma2 = params.sigma_s_db ** 2
    cov = exponential_covariance(pts, params.sigma_s_db, params.d_c)
    try:
        (factor, _), jitter = jittered_cho_factor(cov, solver.jitter * sigma2)
    except LinAlgError as e:
        raise ChannelException(
            ErrorCodeEnum.COVARIANCE_NOT_PSD,
            message=f"shadowing covariance of {len(pts)} positions could not be factorized",
        ) from e
    lower = np.tril(factor)
    return lower @ rng.standard_normal((pts.shape[0], n_fields)), jitter


def _circulant_fields(params: ChannelParams, xs: np.ndarray, ys: np.ndarray, n_fields: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Stationary exponential field on a regular grid via an FFT of the embedded covariance."""
    nx, ny = len(xs), len(ys)
    hx = xs[1] - xs[0] if nx > 1 else 1.0
    hy = ys[1] - ys[0] if ny > 1 else 1.0
    mx, my = 2 * nx, 2 * ny
    lag_x = np.minimum(np.arange(mx), mx - np.arange(mx)) * hx
    lag_y = np.minimum(np.arange(my), my - np.arange(my)) * hy
    dist = np.hypot(lag_x[:, None], lag_y[None, :])
    base = params.sigma_s_db ** 2 * np.exp(-dist / params.d_c)
    eig = np.real(fft2(base))
    if np.min(eig) < -1e-8 * np.max(eig):
        logger.warning(f"⚠️ circulant embedding has negative eigenvalues (min {np.min(eig):.3e}), clipping")
    eig = np.clip(eig, 0.0, None)
    scale = np.sqrt(eig / (mx * my))
    out = np.empty((nx, ny, n_fields))
    # 每次 FFT 产生两个独立的场(实部与虚部)
    for k in range(0, n_fields, 2):
        z = rng.standard_normal((mx, my)) + 1j * rng.standard_normal((mx, my))
        w = fft2(scale * z)
        out[:, :, k] = np.real(w)[:nx, :ny]
        if k + 1 < n_fields:
            out[:, :, k + 1] = np.imag(w)[:nx, :ny]
    return out


def generate_shadowing_map(
    params: ChannelParams,
    positions,
    rng: np.random.Generator,
    n_aps: int = 1,
    solver: Optional[ShadowingSolverConfig] = None,
    bounding_box: Optional[Tuple[float, float, float, float]] = None,
) -> ShadowingMap:
    """
    One realization of the shadowing field covering ``positions``.

    ``params.shadowing`` picks the realization; ``points`` switches to the grid
    automatically above ``solver.max_exact_points`` positions.
    """
    solver = solver or ShadowingSolverConfig()
    pts, _ = as_points(positions)
    kind = params.shadowing if params.sigma_s_db > 0 else ShadowingKind.NONE
    common = dict(sigma_db=params.sigma_s_db, d_c=params.d_c, n_aps=n_aps)
    n_fields = _field_count(params, n_aps)

    if kind is ShadowingKind.NONE:
        return ShadowingMap(kind=ShadowingKind.NONE, **common)

    if kind is ShadowingKind.UNCORRELATED:
        values = params.sigma_s_db * rng.standard_normal((pts.shape[0], n_fields))
        return ShadowingMap(kind=kind, positions=pts.copy(), values=_tile_fields(values, n_aps), **common)

    unique = np.unique(pts, axis=0)
    if kind is ShadowingKind.POINTS and unique.shape[0] <= solver.max_exact_points:
        values, jitter = _exact_fields(params, unique, n_fields, rng, solver)
        logger.debug(f"Shadowing map on {len(unique)} exact positions, jitter {jitter:.1e}")
        return ShadowingMap(kind=kind, positions=unique, values=_tile_fields(values, n_aps), jitter=jitter, **common)

    if kind is ShadowingKind.POINTS:
        logger.info(
            f"📐 {len(unique)} positions exceed max_exact_points={solver.max_exact_points}, using the grid field"
        )
    spacing = solver.grid_spacing_m or params.d_c / 10.0
    x0, y0, x1, y1 = bounding_box or (pts[:, 0].min(), pts[:, 1].min(), pts[:, 0].max(), pts[:, 1].max())
    xs = np.linspace(x0, x1, max(2, int(np.ceil((x1 - x0) / spacing)) + 1))
    ys = np.linspace(y0, y1, max(2, int(np.ceil((y1 - y0) / spacing)) + 1))
    grid = _circulant_fields(params, xs, ys, n_fields, rng)
    return ShadowingMap(kind=ShadowingKind.GRID, grid_axes=(xs, ys), grid_values=_tile_fields(grid, n_aps), **common)
