import hashlib
from pathlib import Path
from typing import List, Set

import pandas as pd

from irlv.core.exceptions import ConfigException, DataException
from irlv.core.logger import logger
from irlv.enums import ErrorCodeEnum
from irlv.infra.storage.storage_interface import ArtifactStorageInterface

# 逗号分隔, 点号小数, 表头, UTF-8, LF
CSV_OPTIONS = {"sep": ",", "lineterminator": "\n", "float_format": "%.17g", "index": False, "encoding": "utf-8"}


class LocalArtifactStorage(ArtifactStorageInterface):
    """
    Files under one root directory. Existing files are never replaced unless
    the storage was opened with ``overwrite=True``; a file may still be
    rewritten within the session that created it.
    """

    def __init__(self, root: Path, overwrite: bool = False):
        self.root = Path(root)
        self.overwrite = overwrite
        self._written: Set[Path] = set()

    def resolve(self, name: str) -> Path:
        return self.root / name

    def exists(self, name: str) -> bool:
        return self.resolve(name).exists()

    def _target(self, name: str) -> Path:
        path = self.resolve(name)
        if path.exists() and not self.overwrite and path not in self._written:
            raise ConfigException(
                f"refusing to overwrite {path}; pass --force to replace it",
                code_enum=ErrorCodeEnum.OUTPUT_EXISTS,
                extra={"path": str(path)},
            )
        path.parent.mkdir(parents=True, exist_ok=True)
        self._written.add(path)
        return path

    def check_writable(self, *names: str) -> None:
        """Fail before any work when an output would be overwritten without --force."""
        if self.overwrite:
            return
        taken = [n for n in names if self.exists(n)]
        if taken:
            raise ConfigException(
                f"refusing to overwrite {self.resolve(taken[0])}; pass --force to replace it",
                code_enum=ErrorCodeEnum.OUTPUT_EXISTS,
                extra={"paths": [str(self.resolve(n)) for n in taken]},
            )

    def _source(self, name: str) -> Path:
        path = self.resolve(name)
        if not path.is_file():
            raise DataException(ErrorCodeEnum.DATA_NOT_FOUND, f"{path} does not exist")
        return path

    def write_text(self, name: str, text: str) -> Path:
        path = self._target(name)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        logger.debug(f"💾 wrote {path}")
        return path

    def read_text(self, name: str) -> str:
        return self._source(name).read_text(encoding="utf-8")

    def write_frame(self, name: str, frame: pd.DataFrame) -> Path:
        path = self._target(name)
        frame.to_csv(path, **CSV_OPTIONS)
        logger.debug(f"💾 wrote {path} ({len(frame)} rows)")
        return path

    def read_frame(self, name: str) -> pd.DataFrame:
        path = self._source(name)
        try:
            return pd.read_csv(path, sep=",", encoding="utf-8")
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            raise DataException(ErrorCodeEnum.RAGGED_ROWS, f"{path} is not a well-formed CSV table: {e}") from e

    def list_objects(self, prefix: str = "") -> List[str]:
        if not self.root.exists():
            return []
        names = [p.relative_to(self.root).as_posix() for p in self.root.rglob("*") if p.is_file()]
        return sorted(n for n in names if n.startswith(prefix))

    def sha256(self, name: str) -> str:
        return hashlib.sha256(self._source(name).read_bytes()).hexdigest()

    def written(self) -> List[str]:
        """Names written through this instance, sorted."""
        return sorted(p.relative_to(self.root).as_posix() for p in self._written)
