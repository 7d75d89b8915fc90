import os
from functools import lru_cache
from pathlib import Path
from string import Template
from typing import Optional

import yaml
from dotenv import load_dotenv
from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from irlv.config.config_settings.config_schema import AppConfig
from irlv.core.exceptions import ConfigException
from irlv.core.logger import logger

BASE_DIR = Path(__file__).resolve().parents[2]
PROJECT_DIR = BASE_DIR.parent
DEFAULT_ENV = "config"


def load_yaml(path: Path) -> dict:
    if not path.exists():
        raise FileNotFoundError(f"配置文件未找到: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return yaml.safe_load(f) or {}


def interpolate_env_vars(obj):
    """
    替换 YAML 中的 ${VAR} 为 os.environ 中的值
    并做类型转换（true/false）
    """
    def convert(value: str):
        v = value.lower()
        if v == "true": return True
        if v == "false": return False
        return value

    if isinstance(obj, dict):
        return {k: interpolate_env_vars(v) for k, v in obj.items()}
    elif isinstance(obj, list):
        return [interpolate_env_vars(i) for i in obj]
    elif isinstance(obj, str):
        raw = Template(obj).safe_substitute(os.environ)
        return convert(raw)
    else:
        return obj


def deep_merge(source, destination):
    """深度合并字典，source 会覆盖 destination。"""
    for key, value in source.items():
        if isinstance(value, dict) and key in destination and isinstance(destination[key], dict):
            destination[key] = deep_merge(value, destination[key])
        else:
            destination[key] = value
    return destination


class EnvOverrides(BaseSettings):
    """IRLV_* environment variables that win over the YAML file."""
    model_config = SettingsConfigDict(env_prefix="IRLV_", extra="ignore")

    jobs: Optional[int] = None
    log_dir: Optional[str] = None
    export_metrics: Optional[bool] = None
    max_exact_points: Optional[int] = None

    def as_config_patch(self) -> dict:
        patch: dict = {}
        if self.jobs is not None:
            patch.setdefault("runner", {})["jobs"] = self.jobs
        if self.export_metrics is not None:
            patch.setdefault("runner", {})["export_metrics"] = self.export_metrics
        if self.log_dir is not None:
            patch.setdefault("logging", {})["log_dir"] = self.log_dir
        if self.max_exact_points is not None:
            patch.setdefault("shadowing", {})["max_exact_points"] = self.max_exact_points
        return patch


def get_env() -> str:
    return os.getenv("ENV", DEFAULT_ENV)


@lru_cache()
def get_app_config() -> AppConfig:
    env = get_env()
    logger.debug(f"🌍 Runtime environment: {env}")

    # 1. 通用 .env
    base_env_path = PROJECT_DIR / ".env"
    if base_env_path.exists():
        load_dotenv(dotenv_path=base_env_path)
        logger.debug(f"✔️ Loaded .env file: {base_env_path}")

    # 2. 特定环境的 .env, 覆盖通用设置
    env_specific_path = PROJECT_DIR / f".env.{env}"
    if env_specific_path.exists():
        load_dotenv(dotenv_path=env_specific_path, override=True)
        logger.debug(f"✔️ Loaded environment .env file: {env_specific_path}")

    config_path = BASE_DIR / "config" / f"{env}.yaml"
    data = interpolate_env_vars(load_yaml(config_path)) if config_path.exists() else {}
    data = deep_merge(EnvOverrides().as_config_patch(), data)

    try:
        config = AppConfig(**data)
    except ValidationError as e:
        logger.critical(f"❌ Runtime settings failed validation: {e}")
        raise ConfigException(f"runtime settings in {config_path} are invalid: {e}") from e
    logger.debug(f"🔧 Runtime settings: {config}")
    return config


def reload_app_config():
    get_app_config.cache_clear()
    return get_app_config()
