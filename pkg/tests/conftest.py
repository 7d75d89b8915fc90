from pathlib import Path
from unittest.mock import patch

import numpy as np
import pytest
import yaml

from irlv.schemas.channel import ChannelParams
from irlv.services.geometry import RingScenario, default_urban_scenario


# 测试中不写日志文件
@pytest.fixture(autouse=True)
def no_file_logging():
    with patch("irlv.main.configure_file_logging"):
        yield


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def ring():
    return RingScenario(r_min=0.1, r_in=2.0, r_out=10.0)


@pytest.fixture
def urban():
    return default_urban_scenario(n_aps=5)


@pytest.fixture
def params():
    return ChannelParams(f=2.12e9, nu=2.0)


def ring_run_config(out_dir: Path, **overrides) -> dict:
    """小规模环形场景配置, 几秒内跑完"""
    config = {
        "schema_version": 1,
        "name": "ring-small",
        "scenario": {"kind": "ring", "r_min": 0.1, "r_in": 2.0, "r_out": 10.0},
        "channel": {"nu": 2.0, "fading": True},
        "model": {"kind": "np"},
        "training": {"n_points": 300},
        "eval": {"n_test_h0": 400, "n_test_h1": 400, "n_maps": 1, "n_thresholds": 200},
        "seed": 7,
        "output": {"dir": str(out_dir)},
    }
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(config.get(key), dict):
            config[key] = {**config[key], **value}
        else:
            config[key] = value
    return config


@pytest.fixture
def write_config(tmp_path):
    """写出一个 YAML 运行配置, 返回其路径"""
    def _write(name: str = "run.yaml", **overrides) -> str:
        path = tmp_path / name
        path.write_text(yaml.safe_dump(ring_run_config(tmp_path / "out", **overrides)), encoding="utf-8")
        return str(path)

    return _write
