from .data.ingest_router import IngestResult, ingest_grid
from .experiments.experiment_router import cmd_evaluate, cmd_roc, cmd_simulate, cmd_train
from .figures.figure_router import cmd_reproduce_figure

__all__ = [
    "IngestResult",
    "cmd_evaluate",
    "cmd_reproduce_figure",
    "cmd_roc",
    "cmd_simulate",
    "cmd_train",
    "ingest_grid",
]
