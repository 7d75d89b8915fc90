# irlv/repo/crud/common/base_repo.py
from typing import List, Optional

import numpy as np
import pandas as pd

from irlv.core.exceptions import DataException
from irlv.core.logger import get_logger
from irlv.enums import ErrorCodeEnum
from irlv.infra.storage import LocalArtifactStorage
from irlv.repo.repo_registrar import RepositoryRegistrar


class BaseRepository(RepositoryRegistrar):
    """
    Artifact access over one storage root. Subclasses know one artifact family
    (datasets, models, run outputs) and its file layout.
    """

    def __init__(self, storage: LocalArtifactStorage, context: Optional[dict] = None):
        self.storage = storage
        self.context = context or {}
        self.logger = get_logger(self.__class__.__name__)

    # ==========================
    # 通用读写
    # ==========================
    def exists(self, name: str) -> bool:
        return self.storage.exists(name)

    def read_frame(self, name: str, required: List[str], finite: bool = True) -> pd.DataFrame:
        """读取表格并检查必需列; finite=True 时所有值必须是有限数值。"""
        frame = self.storage.read_frame(name)
        missing = [c for c in required if c not in frame.columns]
        if missing:
            raise DataException(
                ErrorCodeEnum.DIMENSION_MISMATCH, f"{name} lacks columns {missing}", extra={"columns": list(frame.columns)},
            )
        try:
            values = frame.to_numpy(dtype=float)
        except ValueError as e:
            raise DataException(ErrorCodeEnum.NON_FINITE, f"{name} holds non-numeric values") from e
        if finite and not np.all(np.isfinite(values)):
            raise DataException(ErrorCodeEnum.NON_FINITE, f"{name} holds non-finite values")
        return frame

    def sha256(self, name: str) -> str:
        return self.storage.sha256(name)
