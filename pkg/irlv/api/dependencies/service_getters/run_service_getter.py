# irlv/api/dependencies/service_getters/run_service_getter.py
from typing import Optional, Tuple

from irlv.infra.storage.storage_factory import get_storage_factory
from irlv.repo import RepositoryFactory
from irlv.services.data import GridDataset
from irlv.services.evaluation import ExperimentService
from irlv.services.geometry import Scenario


def get_repository_factory(output_dir: str, force: bool = False, context: Optional[dict] = None) -> RepositoryFactory:
    """输出目录的仓库工厂; 未指定 force 时拒绝覆盖已有文件"""
    storage = get_storage_factory().get_storage(output_dir, overwrite=force)
    return RepositoryFactory(storage, context=context)


def get_input_repository(path: str) -> Tuple[RepositoryFactory, str]:
    """Read-only access to one input file: the factory of its directory and the file name."""
    storage, name = get_storage_factory().open_input(path)
    return RepositoryFactory(storage), name


def get_experiment_service(jobs: Optional[int] = None) -> ExperimentService:
    return ExperimentService(jobs=jobs)


def get_grid_input(path: str, scenario: Scenario) -> Tuple[GridDataset, str]:
    """Parsed grid and the sha256 of the file it came from."""
    repos, name = get_input_repository(path)
    return repos.datasets.load_grid(name, scenario), repos.datasets.sha256(name)
