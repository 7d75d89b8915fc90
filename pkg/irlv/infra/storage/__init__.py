from .local_storage import CSV_OPTIONS, LocalArtifactStorage
from .storage_factory import StorageFactory, get_storage_factory
from .storage_interface import ArtifactStorageInterface

__all__ = [
    "ArtifactStorageInterface",
    "CSV_OPTIONS",
    "LocalArtifactStorage",
    "StorageFactory",
    "get_storage_factory",
]
