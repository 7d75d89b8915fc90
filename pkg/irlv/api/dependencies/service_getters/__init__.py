from .run_service_getter import (
    get_experiment_service,
    get_grid_input,
    get_input_repository,
    get_repository_factory,
)

__all__ = ["get_experiment_service", "get_grid_input", "get_input_repository", "get_repository_factory"]
