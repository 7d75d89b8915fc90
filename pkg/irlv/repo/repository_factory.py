# irlv/repo/repository_factory.py
from typing import Any, Dict, Optional, Type, TypeVar

from irlv.infra.storage import LocalArtifactStorage
from irlv.repo.crud.artifacts.dataset_repo import DatasetRepository
from irlv.repo.crud.artifacts.model_repo import ModelRepository
from irlv.repo.crud.artifacts.run_repo import RunRepository
from irlv.repo.crud.common.base_repo import BaseRepository

RepoType = TypeVar("RepoType", bound=BaseRepository)


class RepositoryNotFoundError(Exception):
    pass


class RepositoryFactory:
    """
    按名称或类型创建并缓存 Repository, 所有实例共享同一个存储根目录。
    """

    def __init__(self, storage: LocalArtifactStorage, context: Optional[dict] = None):
        self._storage = storage
        self.context = context or {}
        self._registry: Dict[str, BaseRepository] = {}

    @property
    def storage(self) -> LocalArtifactStorage:
        return self._storage

    # 👇 通过名称获取
    def get_repo(self, name: str) -> BaseRepository:
        name = name.lower()
        if name not in self._registry:
            repo_cls = BaseRepository.registry.get(name)
            if not repo_cls:
                raise RepositoryNotFoundError(f"Repository '{name}' not registered.")
            self._registry[name] = repo_cls(self._storage, context=self.context)
        return self._registry[name]

    # 👇 通过类型获取
    def get_repo_by_type(self, repo_type: Type[RepoType]) -> RepoType:
        return self.get_repo(repo_type.__name__.replace("Repository", ""))

    @property
    def datasets(self) -> DatasetRepository:
        return self.get_repo_by_type(DatasetRepository)

    @property
    def models(self) -> ModelRepository:
        return self.get_repo_by_type(ModelRepository)

    @property
    def runs(self) -> RunRepository:
        return self.get_repo_by_type(RunRepository)

    def __getattr__(self, item: str) -> Any:
        if item.startswith("_"):
            raise AttributeError(item)
        try:
            return self.get_repo(item)
        except RepositoryNotFoundError:
            raise AttributeError(f"'RepositoryFactory' object has no attribute '{item}'")
