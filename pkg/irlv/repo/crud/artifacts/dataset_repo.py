# irlv/repo/crud/artifacts/dataset_repo.py
from pathlib import Path
from typing import List

import numpy as np
import pandas as pd

from irlv.core.exceptions import DataException
from irlv.enums import ErrorCodeEnum, ShadowingKind
from irlv.repo.crud.common.base_repo import BaseRepository
from irlv.services.channel import AttenuationDataset, ShadowingMap
from irlv.services.channel.path_loss import db_to_linear
from irlv.services.data import GridDataset, grid_frame, parse_grid
from irlv.services.geometry import Scenario


def dataset_columns(n_aps: int) -> List[str]:
    return ["x", "y", *[f"a_{n}" for n in range(1, n_aps + 1)], "label"]


class DatasetRepository(BaseRepository):
    """Feature-vector tables (attenuations in dB), shadowing maps and measured grids."""

    def save(self, name: str, data: AttenuationDataset) -> Path:
        frame = pd.DataFrame(data.positions, columns=["x", "y"])
        a_db = data.a_db
        for n in range(data.n_aps):
            frame[f"a_{n + 1}"] = a_db[:, n]
        frame["label"] = data.labels
        return self.storage.write_frame(name, frame)

    def load(self, name: str, k_f: int = 1) -> AttenuationDataset:
        header = self.storage.read_frame(name).columns
        n_aps = sum(1 for c in header if c.startswith("a_"))
        if n_aps == 0:
            raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"{name} has no attenuation columns a_1..a_N")
        expected = dataset_columns(n_aps)
        if list(header) != expected:
            raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"{name} header {list(header)} != {expected}")
        frame = self.read_frame(name, expected)
        labels = frame["label"].to_numpy()
        if not np.all(np.isin(labels, (-1, 1))):
            raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"{name}: labels must be -1 or +1")
        a = db_to_linear(frame[expected[2:-1]].to_numpy(dtype=float))
        data = AttenuationDataset(frame[["x", "y"]].to_numpy(dtype=float), a, labels.astype(int), k_f)
        self.logger.debug(f"Loaded {name}: {len(data)} vectors, {data.counts()}")
        return data

    def save_shadowing(self, name: str, shadowing: ShadowingMap) -> Path:
        """Shadowing values in dB per position (or grid node) and AP."""
        if shadowing.kind is ShadowingKind.NONE:
            return self.storage.write_frame(name, pd.DataFrame(columns=["x", "y"]))
        if shadowing.kind is ShadowingKind.GRID:
            xs, ys = shadowing.grid_axes
            gx, gy = np.meshgrid(xs, ys, indexing="ij")
            frame = pd.DataFrame({"x": gx.ravel(), "y": gy.ravel()})
            values = shadowing.grid_values.reshape(-1, shadowing.n_aps)
        else:
            frame = pd.DataFrame(shadowing.positions, columns=["x", "y"])
            values = shadowing.values
        for n in range(shadowing.n_aps):
            frame[f"s_{n + 1}"] = values[:, n]
        return self.storage.write_frame(name, frame)

    # --- 网格 ---
    def load_grid(self, name: str, scenario: Scenario) -> GridDataset:
        return parse_grid(self.storage.read_text(name), scenario)

    def save_grid(self, name: str, data: AttenuationDataset) -> Path:
        return self.storage.write_frame(name, grid_frame(data))
