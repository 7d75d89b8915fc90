# irlv/repo/crud/artifacts/run_repo.py
from pathlib import Path
from typing import Dict, Optional

from pydantic import ValidationError

from irlv.core.exceptions import DataException
from irlv.enums import ErrorCodeEnum
from irlv.metrics.run_metrics import metrics_text
from irlv.repo.crud.common.base_repo import BaseRepository
from irlv.schemas.run import Manifest
from irlv.services.evaluation.experiment_service import ExperimentResult
from irlv.services.evaluation.roc import ROC_COLUMNS, RocCurve
from irlv.utils.json_utils import canonical_json

ROC_NAME = "roc.csv"
METRICS_NAME = "metrics.prom"


def manifest_name(command: str) -> str:
    """每个命令一份清单, 同一输出目录可依次运行 simulate, train, evaluate"""
    return f"manifests/{command}.json"


class RunRepository(BaseRepository):
    """ROC tables, per-map curves, metrics and the manifest of one output directory."""

    def save_curve(self, name: str, curve: RocCurve) -> Path:
        return self.storage.write_frame(name, curve.to_frame())

    def load_curve(self, name: str) -> RocCurve:
        # 平均曲线的阈值列为 NaN
        return RocCurve.from_frame(self.read_frame(name, ROC_COLUMNS, finite=False))

    def save_experiment(self, result: ExperimentResult, prefix: str = "") -> Dict[str, Path]:
        """Averaged curve plus one curve per successful map."""
        paths = {"roc": self.save_curve(f"{prefix}{ROC_NAME}", result.curve)}
        for m in result.maps:
            if m.ok:
                paths[f"map_{m.map_index:03d}"] = self.save_curve(f"{prefix}maps/roc_map_{m.map_index:03d}.csv", m.curve)
        return paths

    def save_metrics(self, name: str = METRICS_NAME) -> Path:
        return self.storage.write_text(name, metrics_text())

    def save_report(self, name: str, data: dict) -> Path:
        return self.storage.write_text(name, canonical_json(data))

    def save_manifest(self, manifest: Manifest, name: Optional[str] = None) -> Path:
        """
        Records the digest of every file written so far, then the manifest itself.
        Metrics hold wall-clock durations and are listed without a digest.
        """
        name = name or manifest_name(manifest.command)
        outputs = {
            n: "volatile" if n.endswith(".prom") else self.storage.sha256(n)
            for n in self.storage.written() if n != name
        }
        manifest = manifest.model_copy(update={"outputs": {**manifest.outputs, **outputs}})
        text = canonical_json(manifest.model_dump(mode="json"))
        return self.storage.write_text(name, text)

    def load_manifest(self, name: str) -> Manifest:
        try:
            return Manifest.model_validate_json(self.storage.read_text(name))
        except ValidationError as e:
            raise DataException(ErrorCodeEnum.BAD_MANIFEST, f"{name} is not a valid manifest: {e}") from e
