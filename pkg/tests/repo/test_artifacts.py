import numpy as np
import pytest

from irlv.core.exceptions import ConfigException, DataException
from irlv.enums import ErrorCodeEnum
from irlv.infra.storage import LocalArtifactStorage
from irlv.repo import DatasetRepository, RunRepository, manifest_name
from irlv.schemas.run import Manifest
from irlv.services.channel import build_dataset
from irlv.services.evaluation import roc_from_scores


# 测试覆盖保护
def test_storage_refuses_to_overwrite(tmp_path):
    LocalArtifactStorage(tmp_path).write_text("a.txt", "first")
    storage = LocalArtifactStorage(tmp_path)
    with pytest.raises(ConfigException) as exc:
        storage.write_text("a.txt", "second")
    assert exc.value.code_enum is ErrorCodeEnum.OUTPUT_EXISTS
    assert exc.value.exit_code == 2
    with pytest.raises(ConfigException):
        storage.check_writable("b.txt", "a.txt")
    assert (tmp_path / "a.txt").read_text(encoding="utf-8") == "first"


def test_storage_overwrites_when_forced(tmp_path):
    LocalArtifactStorage(tmp_path).write_text("a.txt", "first")
    storage = LocalArtifactStorage(tmp_path, overwrite=True)
    storage.check_writable("a.txt")
    storage.write_text("a.txt", "second")
    assert storage.read_text("a.txt") == "second"


def test_storage_may_rewrite_its_own_files(tmp_path):
    storage = LocalArtifactStorage(tmp_path)
    storage.write_text("sub/a.txt", "1")
    storage.write_text("sub/a.txt", "2")
    assert storage.written() == ["sub/a.txt"]
    with pytest.raises(DataException) as exc:
        storage.read_text("missing.txt")
    assert exc.value.code_enum is ErrorCodeEnum.DATA_NOT_FOUND


# 测试数据集表格
def test_dataset_table_round_trip(tmp_path, urban, params, rng):
    data = build_dataset(urban, params, None, 50, 1, None, rng)
    repo = DatasetRepository(LocalArtifactStorage(tmp_path))
    repo.save("train.csv", data)
    header = (tmp_path / "train.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header == "x,y,a_1,a_2,a_3,a_4,a_5,label"
    loaded = repo.load("train.csv")
    assert np.array_equal(loaded.labels, data.labels)
    assert np.allclose(loaded.a, data.a, rtol=1e-12)


def test_dataset_table_rejects_bad_labels(tmp_path):
    (tmp_path / "bad.csv").write_text("x,y,a_1,label\n0,0,50,0\n", encoding="utf-8")
    with pytest.raises(DataException):
        DatasetRepository(LocalArtifactStorage(tmp_path)).load("bad.csv")


def test_dataset_table_rejects_ragged_rows(tmp_path):
    (tmp_path / "bad.csv").write_text("x,y,a_1,label\n0,0,50,-1\n1,1\n2,2,3,4,5\n", encoding="utf-8")
    with pytest.raises(DataException):
        DatasetRepository(LocalArtifactStorage(tmp_path)).load("bad.csv")


# 测试 ROC 与清单
def test_curve_round_trip(tmp_path, rng):
    curve = roc_from_scores(rng.normal(size=100), rng.normal(1.0, 1.0, 100))
    repo = RunRepository(LocalArtifactStorage(tmp_path))
    repo.save_curve("roc.csv", curve)
    loaded = repo.load_curve("roc.csv")
    assert np.allclose(loaded.p_fa, curve.p_fa)
    assert np.allclose(loaded.p_md, curve.p_md)


def test_manifest_lists_written_files(tmp_path):
    repo = RunRepository(LocalArtifactStorage(tmp_path))
    repo.save_report("report.json", {"b": 1, "a": 2})
    repo.save_metrics()
    repo.save_manifest(Manifest(command="roc", name="demo", seed=3))
    manifest = repo.load_manifest(manifest_name("roc"))
    assert manifest.seed == 3
    assert set(manifest.outputs) == {"report.json", "metrics.prom"}
    assert manifest.outputs["metrics.prom"] == "volatile"
    assert len(manifest.outputs["report.json"]) == 64


def test_invalid_manifest_is_reported(tmp_path):
    storage = LocalArtifactStorage(tmp_path)
    storage.write_text("manifests/roc.json", '{"command": "roc", "unknown": 1}')
    with pytest.raises(DataException) as exc:
        RunRepository(storage).load_manifest("manifests/roc.json")
    assert exc.value.code_enum is ErrorCodeEnum.BAD_MANIFEST
