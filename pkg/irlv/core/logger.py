# irlv/core/logger.py
import os
import sys
from pathlib import Path
from typing import Optional

from loguru import logger

# 运行环境
ENV = os.getenv("ENV", "development").lower()

_CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - "
    "<level>{message}</level>"
)

# 清除默认 handler
logger.remove()

# 控制台输出
logger.add(
    sys.stderr,
    level="DEBUG" if ENV == "development" else "INFO",
    colorize=True,
    backtrace=True,
    diagnose=False,
    format=_CONSOLE_FORMAT,
)

_file_sinks: list[int] = []


def configure_file_logging(
    log_dir: str,
    rotation: str = "1 week",
    retention: str = "1 month",
    enable_file: bool = True,
) -> Optional[Path]:
    """
    Attach the rotating text sink and the serialized JSON sink.

    Called once by the CLI after the runtime settings are loaded; calling it
    again replaces the previous file sinks.
    """
    for sink_id in _file_sinks:
        logger.remove(sink_id)
    _file_sinks.clear()

    if not enable_file:
        return None

    directory = Path(log_dir)
    directory.mkdir(parents=True, exist_ok=True)

    # 普通文本日志
    _file_sinks.append(logger.add(
        directory / "irlv.log",
        level="DEBUG",
        rotation=rotation,
        retention=retention,
        encoding="utf-8",
        enqueue=True,
        backtrace=True,
    ))
    # JSON 结构化日志, 只记录警告及以上
    _file_sinks.append(logger.add(
        directory / "irlv.json",
        level="WARNING",
        rotation=rotation,
        retention=retention,
        serialize=True,
        encoding="utf-8",
        enqueue=True,
    ))
    logger.debug(f"File logging initialized in {directory} ({ENV} mode).")
    return directory


def get_logger(name: str = None):
    """仿 logging.getLogger() 实现的 loguru logger 工厂方法"""
    if name:
        return logger.bind(module=name)
    return logger
