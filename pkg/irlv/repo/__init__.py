from .crud.artifacts.dataset_repo import DatasetRepository, dataset_columns
from .crud.artifacts.model_repo import ModelRepository
from .crud.artifacts.run_repo import METRICS_NAME, ROC_NAME, RunRepository, manifest_name
from .repository_factory import RepositoryFactory, RepositoryNotFoundError

__all__ = [
    "DatasetRepository",
    "METRICS_NAME",
    "ModelRepository",
    "ROC_NAME",
    "RepositoryFactory",
    "RepositoryNotFoundError",
    "RunRepository",
    "dataset_columns",
    "manifest_name",
]
