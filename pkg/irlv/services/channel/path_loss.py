# irlv/services/channel/path_loss.py
from typing import Union

import numpy as np

from irlv.core.exceptions import ChannelException
from irlv.enums import ErrorCodeEnum
from irlv.schemas.channel import ChannelParams
from irlv.services.geometry import Scenario

ArrayLike = Union[float, np.ndarray]


def _positive(distance: ArrayLike) -> np.ndarray:
    d = np.asarray(distance, dtype=float)
    if np.any(~(d > 0)):
        raise ChannelException(
            ErrorCodeEnum.NON_POSITIVE_DISTANCE,
            message=f"path loss needs distances > 0, got min {np.nanmin(d) if d.size else d}",
        )
    return d


def _scalar_or_array(values: np.ndarray, like: ArrayLike):
    return float(values) if np.ndim(like) == 0 else values


def path_loss_los_db(params: ChannelParams, distance: ArrayLike):
    """10 nu log10(4 pi f d / c)."""
    d = _positive(distance)
    return _scalar_or_array(10.0 * params.nu * np.log10(params.wavenumber * d), distance)


def path_loss_nlos_db(params: ChannelParams, distance: ArrayLike, h_ap: ArrayLike):
    """Urban macro NLOS path loss; distance and AP height in meters, f in Hz."""
    d = _positive(distance)
    h = np.asarray(h_ap, dtype=float)
    if np.any(~(h > 0)):
        raise ChannelException(ErrorCodeEnum.DOMAIN_ERROR, message="AP height must be positive")
    loss = (
        40.0 * (1.0 - 4e-3 * h) * np.log10(d / 1e3)
        - 18.0 * np.log10(h)
        + 21.0 * np.log10(params.f / 1e6)
        + 80.0
    )
    return _scalar_or_array(loss, distance)


def mean_path_loss_db(scenario: Scenario, params: ChannelParams, points: np.ndarray) -> np.ndarray:
    """(n, n_ap) path loss with the LOS/NLOS formula chosen per link by the scenario."""
    distances = scenario.distances_to_aps(points)
    los = scenario.los_matrix(points)
    heights = np.broadcast_to(scenario.ap_heights[None, :], distances.shape)
    loss = np.empty_like(distances)
    if np.any(los):
        loss[los] = path_loss_los_db(params, distances[los])
    if np.any(~los):
        loss[~los] = path_loss_nlos_db(params, distances[~los], heights[~los])
    return loss


def db_to_linear(x_db: ArrayLike):
    return np.power(10.0, np.asarray(x_db, dtype=float) / 10.0)


def linear_to_db(x: ArrayLike):
    return 10.0 * np.log10(np.asarray(x, dtype=float))
