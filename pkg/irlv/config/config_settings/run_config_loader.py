# irlv/config/config_settings/run_config_loader.py
import hashlib
import json
from pathlib import Path
from typing import List, Union

from pydantic import BaseModel, ValidationError

from irlv.config.config_settings.config_loader import load_config_file
from irlv.core.exceptions import ConfigException
from irlv.core.logger import logger
from irlv.enums.response_codes import ErrorCodeEnum
from irlv.schemas.run import FigureBundle, RunConfig

FIGURES_DIR = Path(__file__).resolve().parent.parent / "figures"


def _drop_anchors(data: dict) -> dict:
    # 顶层 x- 开头的键只用于 YAML 锚点复用
    return {k: v for k, v in data.items() if not str(k).startswith("x-")}


def _diagnostics(error: ValidationError) -> List[str]:
    """每个校验错误一行: 字段路径 + 原因"""
    return [f"{'.'.join(str(p) for p in e['loc']) or '<root>'}: {e['msg']}" for e in error.errors()]


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """Schema-validate one run document; nothing is written before this succeeds."""
    data = _drop_anchors(load_config_file(path))
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        lines = _diagnostics(e)
        for line in lines:
            logger.error(f"❌ {path}: {line}")
        raise ConfigException(f"{path} failed validation: {'; '.join(lines)}", extra={"errors": lines}) from e


def available_figures() -> List[str]:
    return sorted(p.stem for p in FIGURES_DIR.glob("*.yaml"))


def load_figure_bundle(figure: str) -> FigureBundle:
    path = FIGURES_DIR / f"{figure}.yaml"
    if not path.exists():
        raise ConfigException(
            f"unknown figure '{figure}', choose from {available_figures()}",
            code_enum=ErrorCodeEnum.UNKNOWN_FIGURE,
        )
    data = _drop_anchors(load_config_file(path))
    try:
        return FigureBundle.model_validate(data)
    except ValidationError as e:
        raise ConfigException(f"figure bundle {figure} is invalid: {'; '.join(_diagnostics(e))}") from e


def config_digest(config: BaseModel) -> str:
    """sha256 of the canonical JSON form; equal configurations give equal digests."""
    canonical = json.dumps(config.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
