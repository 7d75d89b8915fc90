# irlv/api/routes/data/ingest_router.py
from typing import NamedTuple, Optional

import numpy as np

from irlv.api._base import FORCE, Arg, CommandRouter, new_manifest
from irlv.api.dependencies import get_grid_input, get_repository_factory
from irlv.config.config_settings import load_run_config
from irlv.core.exceptions import ConfigException
from irlv.core.logger import get_logger
from irlv.repo import manifest_name
from irlv.schemas.run import GridSection, Manifest
from irlv.services.channel import AttenuationDataset
from irlv.services.data import GridDataset
from irlv.services.evaluation.experiment_service import map_seed

logger = get_logger(__name__)

router = CommandRouter()


class IngestResult(NamedTuple):
    grid: GridDataset
    train: AttenuationDataset
    test: AttenuationDataset
    manifest: Manifest


@router.command(
    "ingest",
    summary="validate a measured attenuation grid and split its cells into training and test sets",
    arguments=[
        Arg.of("config", help="run configuration naming the scenario (APs and ROI) and the grid section"),
        Arg.of("path", nargs="?", default=None, help="grid CSV; defaults to grid.path of the configuration"),
        Arg.of("--n-train", dest="n_train", type=int, default=None, help="training cells, overrides grid.n_train"),
        FORCE,
    ],
)
def ingest_grid(
    config: str,
    path: Optional[str] = None,
    n_train: Optional[int] = None,
    force: bool = False,
) -> IngestResult:
    """
    Grid CSV (header ``x, y, ap_1..ap_N`` in dB) to labelled train/test CSVs.

    Cells are labelled by the scenario's ROI. The split draws from the same
    stream as ``roc`` on the same configuration, so both see the same cells.
    """
    rc = load_run_config(config)
    section = rc.grid
    if section is None:
        if path is None:
            raise ConfigException("no grid to ingest: pass a path or add a grid section to the configuration")
        section = GridSection(path=path)
    path = path or section.path
    n_train = n_train or section.n_train

    grid, digest = get_grid_input(path, rc.scenario)
    train, test = grid.split(n_train, np.random.default_rng(map_seed(rc.seed, 0)))

    repos = get_repository_factory(rc.output.dir, force)
    repos.storage.check_writable("train.csv", "test.csv", manifest_name("ingest"))
    repos.datasets.save("train.csv", train)
    repos.datasets.save("test.csv", test)

    manifest = new_manifest(
        "ingest", rc, inputs={path: digest},
        results={
            "cells": len(grid),
            "n_aps": grid.n_aps,
            "spacing": grid.spacing,
            "complete": grid.complete,
            "missing_cells": int(grid.missing_mask.sum()),
            "train": train.counts(),
            "test": test.counts(),
        },
    )
    repos.runs.save_manifest(manifest)
    logger.info(f"✅ ingest: {len(grid)} cells -> {len(train)} train / {len(test)} test")
    return IngestResult(grid, train, test, manifest)
