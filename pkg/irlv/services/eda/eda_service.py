# irlv/services/eda/eda_service.py
"""
Estimated distance approach.

Each attenuation is turned into a distance by inverting the link's path-loss
law; the position minimizing sum_n (|x - x_n| - d_n)^2 is found by bounded
least squares from several starts, and its signed distance to the ROI border
is thresholded.
"""
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.optimize import least_squares

from irlv.core.exceptions import NumericException
from irlv.core.logger import get_logger
from irlv.enums import ErrorCodeEnum, LosState
from irlv.schemas.channel import ChannelParams
from irlv.schemas.eda import EdaModel
from irlv.services.channel import AttenuationDataset, FeatureVector
from irlv.services.channel.path_loss import linear_to_db, path_loss_los_db, path_loss_nlos_db
from irlv.services.geometry import Position
from irlv.services.learning.preprocessing import feature_matrix, is_single

logger = get_logger(__name__)

# 二分 60 次后 log10(d) 的区间缩小 2^-60 倍
_BISECTION_STEPS = 60


class DistanceEstimate(NamedTuple):
    distance: Union[float, np.ndarray]
    clamped: Union[bool, np.ndarray]


@dataclass(frozen=True)
class PositionFit:
    positions: np.ndarray  # (n, 2)
    residuals: np.ndarray  # (n,) 最优起点的残差平方和
    converged: np.ndarray
    ambiguous: bool
    clamped: np.ndarray  # (n,) 至少一条链路被截断

    def position(self, i: int = 0) -> Position:
        return Position.from_array(self.positions[i])


# --- 路损反演 ---
def _los_array(los_state, shape) -> np.ndarray:
    if isinstance(los_state, (LosState, str)):
        return np.full(shape, LosState(los_state) is LosState.LOS)
    arr = np.asarray(los_state)
    if arr.dtype == bool:
        return np.broadcast_to(arr, shape)
    return np.broadcast_to(np.vectorize(lambda s: LosState(s) is LosState.LOS)(arr), shape)


def invert_path_loss(
    params: ChannelParams,
    a_db,
    los_state,
    h_ap=15.0,
    d_min: float = 1.0,
    d_max: float = 1e4,
) -> DistanceEstimate:
    """
    Distance whose path loss equals ``a_db``: closed form for LOS, bisection on
    log10(d) of the monotone NLOS law otherwise. Values outside the path loss
    of [d_min, d_max] are clamped and flagged.
    """
    x = np.asarray(a_db, dtype=float)
    los = _los_array(los_state, x.shape)
    heights = np.broadcast_to(np.asarray(h_ap, dtype=float), x.shape)

    lo_db = np.where(los, path_loss_los_db(params, d_min), path_loss_nlos_db(params, np.full(x.shape, d_min), heights))
    hi_db = np.where(los, path_loss_los_db(params, d_max), path_loss_nlos_db(params, np.full(x.shape, d_max), heights))
    clamped = (x < lo_db) | (x > hi_db)
    target = np.clip(x, lo_db, hi_db)

    d = np.where(los, 10.0 ** (target / (10.0 * params.nu)) / params.wavenumber, np.nan)
    nlos = ~los
    if np.any(nlos):
        t_lo = np.full(int(np.sum(nlos)), np.log10(d_min))
        t_hi = np.full_like(t_lo, np.log10(d_max))
        goal, h = target[nlos], heights[nlos]
        for _ in range(_BISECTION_STEPS):
            mid = 0.5 * (t_lo + t_hi)
            below = path_loss_nlos_db(params, 10.0 ** mid, h) < goal
            t_lo = np.where(below, mid, t_lo)
            t_hi = np.where(below, t_hi, mid)
        d[nlos] = 10.0 ** (0.5 * (t_lo + t_hi))
    d = np.clip(d, d_min, d_max)

    if np.any(clamped):
        logger.warning(f"⚠️ {int(np.sum(clamped))} attenuation(s) outside the invertible range, distances clamped")
    if x.ndim == 0:
        return DistanceEstimate(float(d), bool(clamped))
    return DistanceEstimate(d, clamped)


# --- 位置估计 ---
def _cost(x: np.ndarray, aps: np.ndarray, target: np.ndarray) -> np.ndarray:
    diff = x[:, None, :] - aps[None, :, :]
    r = np.hypot(diff[..., 0], diff[..., 1]) - target
    return np.sum(r ** 2, axis=1)


def _residuals(p: np.ndarray, aps: np.ndarray, target: np.ndarray) -> np.ndarray:
    return np.hypot(p[0] - aps[:, 0], p[1] - aps[:, 1]) - target


def _jacobian(p: np.ndarray, aps: np.ndarray, target: np.ndarray) -> np.ndarray:
    diff = p[None, :] - aps
    dist = np.maximum(np.hypot(diff[:, 0], diff[:, 1]), 1e-12)
    return diff / dist[:, None]


def _least_squares(model: EdaModel, starts: np.ndarray, aps: np.ndarray, target: np.ndarray):
    """One bounded trust-region fit per (point, start) row, then projected into the area."""
    x0, y0, x1, y1 = model.scenario.bounding_box()
    bounds = ([x0, y0], [x1, y1])
    x = np.empty_like(starts)
    converged = np.zeros(starts.shape[0], dtype=bool)
    for i, (start, t) in enumerate(zip(starts, target)):
        res = least_squares(
            _residuals, start, jac=_jacobian, bounds=bounds, args=(aps, t), method="trf",
            xtol=model.tol, ftol=model.tol, gtol=model.tol, max_nfev=model.max_iter,
        )
        x[i] = res.x
        converged[i] = res.status > 0
    x = model.scenario.project_to_area(x)
    return x, _cost(x, aps, target), converged


def _single_ap_fit(model: EdaModel, distances: np.ndarray) -> np.ndarray:
    """On the circle of each distance, the point nearest the area centroid."""
    ap = model.scenario.ap_positions[0]
    x0, y0, x1, y1 = model.scenario.bounding_box()
    toward = np.array([(x0 + x1) / 2.0, (y0 + y1) / 2.0]) - ap
    norm = np.hypot(*toward)
    unit = toward / norm if norm > 0 else np.array([1.0, 0.0])
    return model.scenario.project_to_area(ap[None, :] + distances[:, 0:1] * unit[None, :])


def fit_positions(model: EdaModel, a, los: Optional[np.ndarray] = None) -> PositionFit:
    """
    Least-squares positions for an (n, n_ap) matrix of linear attenuations.

    ``los`` is the (n, n_ap) LOS mask of the true links; without it the
    scenario decides from the feature vector's recorded position, or every
    link is taken as NLOS.
    """
    scenario = model.scenario
    a = feature_matrix(a, scenario.n_aps)
    n, n_ap = a.shape
    if los is None:
        los = np.zeros((n, n_ap), dtype=bool)
    los = np.broadcast_to(np.asarray(los, dtype=bool), (n, n_ap))
    heights = np.broadcast_to(scenario.ap_heights[None, :], (n, n_ap))
    estimate = invert_path_loss(
        model.params, linear_to_db(a), los, heights, d_min=model.d_min, d_max=model.distance_cap,
    )
    distances = np.asarray(estimate.distance).reshape(n, n_ap)
    clamped = np.asarray(estimate.clamped).reshape(n, n_ap).any(axis=1)
    aps = scenario.ap_positions

    ambiguous = n_ap < 3
    if ambiguous:
        logger.warning(f"⚠️ {n_ap} AP(s) cannot fix a position, the fit is ambiguous")
    if n_ap == 1:
        pts = _single_ap_fit(model, distances)
        return PositionFit(pts, _cost(pts, aps, distances), np.ones(n, dtype=bool), True, clamped)

    rng = np.random.default_rng(model.seed)
    starts = scenario.sample_uniform(None, rng, n * model.n_starts)
    target = np.repeat(distances, model.n_starts, axis=0)
    x, cost, converged = _least_squares(model, starts, aps, target)

    x = x.reshape(n, model.n_starts, 2)
    cost = cost.reshape(n, model.n_starts)
    converged = converged.reshape(n, model.n_starts)
    ranked = np.where(converged, cost, np.inf)
    if np.any(np.isinf(ranked.min(axis=1))):
        failed = np.flatnonzero(np.isinf(ranked.min(axis=1)))
        raise NumericException(
            ErrorCodeEnum.NOT_CONVERGED,
            message=f"position fit did not converge from any of {model.n_starts} starts for {len(failed)} vector(s)",
            extra={"rows": failed[:10].tolist(), "residuals": cost[failed[:10]].min(axis=1).tolist()},
        )
    best = np.argmin(ranked, axis=1)
    rows = np.arange(n)
    return PositionFit(x[rows, best], cost[rows, best], converged[rows, best], ambiguous, clamped)


def _los_for(model: EdaModel, a, los):
    if los is not None:
        return los
    if isinstance(a, FeatureVector) and a.position is not None:
        return model.scenario.los_matrix(a.position)
    if isinstance(a, AttenuationDataset):
        return model.scenario.los_matrix(a.positions)
    return None


def estimate_position(model: EdaModel, a, los=None) -> Position:
    """Best-of-starts least-squares position of one feature vector."""
    return fit_positions(model, a, _los_for(model, a, los)).position(0)


def eda_scores(model: EdaModel, a, los=None) -> np.ndarray:
    """Signed border distance of each fitted position; larger means farther outside the ROI."""
    fit = fit_positions(model, a, _los_for(model, a, los))
    return np.asarray(model.scenario.signed_border_distance(fit.positions), dtype=float)


def eda_decide(model: EdaModel, a, los=None, d_delta: Optional[float] = None):
    """-1 iff the signed border distance of the fitted position is below d_delta."""
    threshold = model.d_delta if d_delta is None else d_delta
    scores = eda_scores(model, a, los)
    decisions = np.where(scores < threshold, -1, 1)
    single = is_single(a, model.scenario.n_aps)
    return int(decisions[0]) if single else decisions
