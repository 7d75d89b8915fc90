# irlv/services/data/grid_service.py
"""
Measured attenuation grids: one row per cell, ``x, y, ap_1..ap_N`` in dB.
"""
import io
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from irlv.core.exceptions import DataException
from irlv.core.logger import get_logger
from irlv.enums import ErrorCodeEnum
from irlv.services.channel import AttenuationDataset
from irlv.services.channel.path_loss import db_to_linear, linear_to_db
from irlv.services.geometry import Scenario, UrbanScenario

logger = get_logger(__name__)


def grid_columns(n_aps: int):
    return ["x", "y", *[f"ap_{n}" for n in range(1, n_aps + 1)]]


@dataclass(frozen=True)
class GridDataset:
    positions: np.ndarray  # (n, 2) 网格单元中心
    a_db: np.ndarray  # (n, n_ap)
    labels: np.ndarray
    spacing: Optional[float]
    missing_mask: np.ndarray  # (nx, ny), True 表示规则网格上缺失的单元
    ap_positions: np.ndarray
    roi_bounds: Optional[Tuple[float, float, float, float]]  # 环形场景为 None

    def __len__(self) -> int:
        return self.positions.shape[0]

    @property
    def n_aps(self) -> int:
        return self.a_db.shape[1]

    @property
    def complete(self) -> bool:
        return not bool(np.any(self.missing_mask))

    def to_dataset(self) -> AttenuationDataset:
        return AttenuationDataset(self.positions, db_to_linear(self.a_db), self.labels)

    def split(self, n_train: int, rng: np.random.Generator) -> Tuple[AttenuationDataset, AttenuationDataset]:
        """``n_train`` random cells for training, the others for testing."""
        if not 0 < n_train < len(self):
            raise DataException(
                ErrorCodeEnum.DIMENSION_MISMATCH,
                f"cannot take {n_train} training cells out of {len(self)}",
            )
        data = self.to_dataset()
        order = rng.permutation(len(self))
        return data.subset(np.sort(order[:n_train])), data.subset(np.sort(order[n_train:]))


def _check_rows(text: str) -> None:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, "grid file is empty")
    width = lines[0].count(",")
    ragged = [i + 1 for i, ln in enumerate(lines) if ln.count(",") != width]
    if ragged:
        raise DataException(
            ErrorCodeEnum.RAGGED_ROWS,
            f"{len(ragged)} row(s) do not have {width + 1} fields, first at line {ragged[0]}",
            extra={"lines": ragged[:10]},
        )


def _lattice(positions: np.ndarray):
    """Spacing and missing-cell mask of the smallest lattice holding every cell."""
    xs, ys = np.unique(positions[:, 0]), np.unique(positions[:, 1])
    if xs.size * ys.size > 4 * positions.shape[0]:
        # 散点, 不构成规则网格
        logger.warning(f"⚠️ the {positions.shape[0]} cells do not lie on a regular lattice")
        return None, np.zeros((0, 0), dtype=bool)
    steps = np.concatenate([np.diff(xs), np.diff(ys)])
    spacing = float(steps.min()) if steps.size else None
    mask = np.ones((xs.size, ys.size), dtype=bool)
    mask[np.searchsorted(xs, positions[:, 0]), np.searchsorted(ys, positions[:, 1])] = False
    return spacing, mask


def parse_grid(text: str, scenario: Scenario) -> GridDataset:
    """Validate a grid CSV against the scenario's APs and label each cell by the ROI."""
    _check_rows(text)
    frame = pd.read_csv(io.StringIO(text), sep=",")
    expected = grid_columns(scenario.n_aps)
    if list(frame.columns) != expected:
        raise DataException(
            ErrorCodeEnum.DIMENSION_MISMATCH,
            f"grid header {list(frame.columns)} does not match {expected}",
        )
    try:
        values = frame.to_numpy(dtype=float)
    except ValueError as e:
        raise DataException(ErrorCodeEnum.NON_FINITE, f"grid holds non-numeric values: {e}") from e
    if not np.all(np.isfinite(values)):
        rows = np.flatnonzero(~np.all(np.isfinite(values), axis=1))
        raise DataException(
            ErrorCodeEnum.NON_FINITE,
            f"{rows.size} grid row(s) hold non-finite values, first at data row {rows[0] + 1}",
            extra={"rows": rows[:10].tolist()},
        )
    positions, a_db = values[:, :2], values[:, 2:]
    if np.unique(positions, axis=0).shape[0] != positions.shape[0]:
        raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, "grid lists a cell more than once")

    labels = scenario.labels(positions)
    n_h0 = int(np.sum(labels == -1))
    if n_h0 == 0 or n_h0 == len(labels):
        raise DataException(
            ErrorCodeEnum.EMPTY_CLASS,
            f"the ROI covers {n_h0} of {len(labels)} grid cells; both classes are needed",
        )
    spacing, mask = _lattice(positions)
    if np.any(mask):
        logger.warning(f"⚠️ grid is incomplete: {int(mask.sum())} lattice cell(s) missing")
    logger.info(f"📥 grid: {len(labels)} cells, {scenario.n_aps} APs, spacing {spacing}, {n_h0} inside the ROI")
    return GridDataset(
        positions=positions,
        a_db=a_db,
        labels=labels,
        spacing=spacing,
        missing_mask=mask,
        ap_positions=scenario.ap_positions,
        roi_bounds=scenario.roi.bounds if isinstance(scenario, UrbanScenario) else None,
    )


def grid_frame(data: AttenuationDataset) -> pd.DataFrame:
    """A dataset in the grid layout; fading-free simulated cells round-trip through ``parse_grid``."""
    frame = pd.DataFrame(data.positions, columns=["x", "y"])
    a_db = linear_to_db(data.a)
    for n in range(data.n_aps):
        frame[f"ap_{n + 1}"] = a_db[:, n]
    return frame
