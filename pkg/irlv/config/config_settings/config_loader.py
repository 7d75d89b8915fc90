import json
from pathlib import Path
from typing import Any, Dict, Union

import yaml

from irlv.core.exceptions import ConfigException
from irlv.core.logger import logger
from irlv.enums.response_codes import ErrorCodeEnum

BASE_DIR = Path(__file__).resolve().parent.parent


def load_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """根据扩展名加载 JSON/YAML 配置; 相对路径先按当前目录解析, 再按配置包目录解析"""
    config_path = Path(path)
    if not config_path.is_absolute() and not config_path.exists():
        config_path = BASE_DIR / config_path

    config_path = config_path.resolve()
    logger.info(f"Loading config file: {config_path}")
    if not config_path.exists():
        raise ConfigException(f"config file {path} does not exist", code_enum=ErrorCodeEnum.CONFIG_NOT_FOUND)

    try:
        with config_path.open("r", encoding="utf-8") as f:
            if config_path.suffix == ".json":
                data = json.load(f)
            elif config_path.suffix in (".yaml", ".yml"):
                data = yaml.safe_load(f)
            else:
                raise ConfigException(f"unsupported config format: {config_path.suffix}")
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        logger.error(f"Config file failed to parse [{config_path}]: {e}")
        raise ConfigException(f"config file {config_path} failed to parse: {e}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigException(f"config file {config_path} must hold a mapping at top level")
    return data
