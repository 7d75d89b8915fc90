# irlv/repo/crud/artifacts/model_repo.py
from pathlib import Path

import pandas as pd

from irlv.repo.crud.common.base_repo import BaseRepository
from irlv.schemas.run import Experiment
from irlv.services.evaluation.verifiers import Verifier, VerifierFactory


class ModelRepository(BaseRepository):
    """Trained verifiers in the flat model text format."""

    def save(self, name: str, verifier: Verifier) -> Path:
        path = self.storage.write_text(name, verifier.dump())
        self.logger.info(f"💾 {verifier.kind.value} model saved to {path}")
        return path

    def load(self, name: str, experiment: Experiment) -> Verifier:
        return VerifierFactory.load(experiment, self.storage.read_text(name))

    def save_table(self, name: str, frame: pd.DataFrame) -> Path:
        """Auxiliary model tables, e.g. the quantized pmfs."""
        return self.storage.write_frame(name, frame)
