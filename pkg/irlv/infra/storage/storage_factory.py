import threading
from pathlib import Path
from typing import Optional, Tuple

from irlv.config.config_settings.config_schema import AppConfig
from irlv.config.settings import settings
from irlv.core.logger import logger
from irlv.infra.storage.local_storage import LocalArtifactStorage


class StorageFactory:
    """
    单例的存储工厂。

    每次请求返回新的存储实例, 覆盖保护按命令生效。
    相对路径以 runner.output_root 为基准。
    """

    _instance = None
    _lock = threading.Lock()

    def __new__(cls, *args, **kwargs):
        if not cls._instance:
            with cls._lock:
                if not cls._instance:
                    cls._instance = super().__new__(cls)
        return cls._instance

    def __init__(self, app_config: Optional[AppConfig] = None):
        if getattr(self, "_initialized", False):
            return
        with self._lock:
            if getattr(self, "_initialized", False):
                return
            self._settings = app_config or settings
            self._initialized = True

    def resolve_root(self, output_dir: str) -> Path:
        path = Path(output_dir)
        if not path.is_absolute():
            path = Path(self._settings.runner.output_root) / path
        return path.resolve()

    def get_storage(self, output_dir: str, overwrite: bool = False) -> LocalArtifactStorage:
        root = self.resolve_root(output_dir)
        logger.debug(f"Opening artifact storage at {root} (overwrite={overwrite})")
        return LocalArtifactStorage(root, overwrite=overwrite)

    def open_input(self, path: str) -> Tuple[LocalArtifactStorage, str]:
        """输入文件按当前工作目录解析, 返回 (所在目录的存储, 文件名)。"""
        resolved = Path(path).resolve()
        return self.get_storage(str(resolved.parent)), resolved.name


def get_storage_factory() -> StorageFactory:
    return StorageFactory()
