from abc import ABC, abstractmethod
from pathlib import Path
from typing import List

import pandas as pd


class ArtifactStorageInterface(ABC):
    """
    所有产物存储后端必须实现的统一接口。
    名称是相对于存储根目录的路径, 例如 'maps/roc_map_000.csv'。
    """

    @abstractmethod
    def resolve(self, name: str) -> Path:
        """名称对应的绝对路径。"""
        pass

    @abstractmethod
    def exists(self, name: str) -> bool:
        pass

    @abstractmethod
    def write_text(self, name: str, text: str) -> Path:
        """写入文本 (UTF-8, LF)。"""
        pass

    @abstractmethod
    def read_text(self, name: str) -> str:
        pass

    @abstractmethod
    def write_frame(self, name: str, frame: pd.DataFrame) -> Path:
        """以统一的 CSV 方言写出表格。"""
        pass

    @abstractmethod
    def read_frame(self, name: str) -> pd.DataFrame:
        pass

    @abstractmethod
    def list_objects(self, prefix: str = "") -> List[str]:
        """列出名称, 按字典序。"""
        pass
