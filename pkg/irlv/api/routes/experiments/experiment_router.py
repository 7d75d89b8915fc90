# irlv/api/routes/experiments/experiment_router.py
"""
simulate, train, evaluate and roc.

Every handler validates its configuration and inputs before the output
directory is touched, so a rejected run leaves no files behind.
"""
from typing import Dict, Optional, Tuple

import numpy as np

from irlv.api._base import FORCE, JOBS, Arg, CommandRouter, new_manifest
from irlv.api.dependencies import (
    get_experiment_service,
    get_grid_input,
    get_input_repository,
    get_repository_factory,
)
from irlv.config.config_settings import load_run_config
from irlv.config.settings import settings
from irlv.core.exceptions import ConfigException, DataException
from irlv.core.logger import get_logger
from irlv.enums import ErrorCodeEnum, ModelKind, RegionLabel
from irlv.repo import METRICS_NAME, ROC_NAME, RepositoryFactory, manifest_name
from irlv.schemas.run import Manifest, RunConfig
from irlv.services.channel import AttenuationDataset
from irlv.services.evaluation import (
    ExperimentResult,
    VerifierFactory,
    auc,
    map_data,
    md_at_fa,
    operating_points,
    rates_at,
    roc_from_scores,
)
from irlv.services.evaluation.experiment_service import map_seed

logger = get_logger(__name__)

router = CommandRouter()

CONFIG = Arg.of("config", help="run configuration file (YAML or JSON)")
GRID = Arg.of("--grid", default=None, help="measured grid CSV, overrides grid.path of the configuration")


def map_prefix(rc: RunConfig, map_index: int) -> str:
    return f"map_{map_index:03d}/" if rc.eval.n_maps > 1 else ""


def export_metrics(rc: RunConfig) -> bool:
    return settings.runner.export_metrics if rc.output.export_metrics is None else rc.output.export_metrics


def run_recorded(
    rc: RunConfig,
    repos: RepositoryFactory,
    grid: Optional[str] = None,
    jobs: Optional[int] = None,
    prefix: str = "",
) -> Tuple[ExperimentResult, Dict[str, str]]:
    """Run one experiment and write its curves and summary under ``prefix``."""
    inputs: Dict[str, str] = {}
    grid_data = None
    if rc.grid is not None:
        path = grid or rc.grid.path
        grid_data, inputs[path] = get_grid_input(path, rc.scenario)
    elif grid is not None:
        raise ConfigException(f"--grid was given but '{rc.name}' has no grid section")

    result = get_experiment_service(jobs).run(rc, grid_data)
    repos.runs.save_experiment(result, prefix)
    repos.runs.save_report(f"{prefix}summary.json", result.summary())
    return result, inputs


def _split_seed(rc: RunConfig) -> np.random.Generator:
    # 与第 0 张地图的划分随机流一致
    return np.random.default_rng(map_seed(rc.seed, 0).spawn(3)[2])


def _verifier_seed(rc: RunConfig) -> int:
    return int(map_seed(rc.seed, 0).generate_state(1)[0])


# ==========================
# simulate
# ==========================
@router.command(
    "simulate",
    summary="draw training, validation and test vectors for every shadowing map",
    arguments=[CONFIG, FORCE],
)
def cmd_simulate(config: str, force: bool = False) -> Manifest:
    rc = load_run_config(config)
    if rc.grid is not None:
        raise ConfigException("simulate draws synthetic channels; measured grids go through 'ingest'")
    repos = get_repository_factory(rc.output.dir, force)
    repos.storage.check_writable(f"{map_prefix(rc, 0)}train.csv", manifest_name("simulate"))

    results = {}
    for i in range(rc.eval.n_maps):
        data = map_data(rc, i)
        prefix = map_prefix(rc, i)
        repos.datasets.save(f"{prefix}train.csv", data.train)
        repos.datasets.save(f"{prefix}validation.csv", data.validation)
        repos.datasets.save(f"{prefix}test.csv", data.test)
        repos.datasets.save_shadowing(f"{prefix}shadowing.csv", data.shadowing)
        # 全部单元按网格格式导出, 可直接交给 ingest
        repos.datasets.save_grid(f"{prefix}grid.csv", AttenuationDataset.concat([data.train, data.validation, data.test]))
        results[f"map_{i:03d}"] = {
            "train": data.train.counts(),
            "validation": data.validation.counts(),
            "test": data.test.counts(),
            "shadowing": data.shadowing.covariance_descriptor,
        }
        logger.info(f"🗺️ map {i}: {len(data.train)} train, {len(data.validation)} validation, {len(data.test)} test vectors")

    manifest = new_manifest("simulate", rc, map_indices=range(rc.eval.n_maps), results=results)
    repos.runs.save_manifest(manifest)
    logger.info(f"✅ simulate: outputs in {repos.storage.root}")
    return manifest


# ==========================
# train
# ==========================
@router.command(
    "train",
    summary="fit the configured model on a dataset and calibrate its threshold",
    arguments=[
        CONFIG,
        Arg.of("dataset", help="training CSV written by simulate or ingest"),
        Arg.of("--validation", default=None, help="validation CSV; by default a share of the dataset is held out"),
        Arg.of("--drop-h1", dest="drop_h1", action="store_true", help="drop H1 rows before one-class training"),
        FORCE,
    ],
)
def cmd_train(
    config: str,
    dataset: str,
    validation: Optional[str] = None,
    drop_h1: bool = False,
    force: bool = False,
) -> Manifest:
    rc = load_run_config(config)
    kind = rc.model.kind

    in_repos, name = get_input_repository(dataset)
    train = in_repos.datasets.load(name, k_f=rc.channel.k_f)
    inputs = {dataset: in_repos.datasets.sha256(name)}
    if validation is not None:
        v_repos, v_name = get_input_repository(validation)
        held_out = v_repos.datasets.load(v_name, k_f=rc.channel.k_f)
        inputs[validation] = v_repos.datasets.sha256(v_name)
    else:
        held_out, train = train.split(rc.training.validation_fraction, _split_seed(rc))

    if drop_h1:
        if kind.one_class:
            dropped = train.counts()["h1"]
            train = train.of_label(RegionLabel.H0)
            logger.warning(f"⚠️ dropped {dropped} H1 row(s) before {kind.value} training")
        else:
            logger.info(f"--drop-h1 has no effect on the two-class model {kind.value}")

    repos = get_repository_factory(rc.output.dir, force)
    repos.storage.check_writable("model.txt", "training_report.json", manifest_name("train"))

    verifier = VerifierFactory.create(rc, seed=_verifier_seed(rc))
    report = verifier.fit(train, held_out)
    calibration = held_out.of_label(RegionLabel.H0)
    if len(calibration) == 0:
        logger.warning("⚠️ validation data holds no H0 vectors, calibrating on the training H0 vectors")
        calibration = train.of_label(RegionLabel.H0)
    threshold = verifier.calibrate(calibration, rc.eval.target_fa)

    repos.models.save("model.txt", verifier)
    if kind is ModelKind.NP_QUANTIZED:
        repos.models.save_table("pmf.csv", verifier.pdfs.to_frame())
    repos.runs.save_report("training_report.json", report)

    manifest = new_manifest(
        "train", rc, inputs=inputs,
        results={
            "threshold": threshold,
            "target_fa": rc.eval.target_fa,
            "calibration_vectors": len(calibration),
            "train": train.counts(),
            "validation": held_out.counts(),
            "report": report,
        },
    )
    repos.runs.save_manifest(manifest)
    logger.info(f"✅ train: {kind.value} threshold {threshold:.6g} at target FA {rc.eval.target_fa}")
    return manifest


# ==========================
# evaluate
# ==========================
@router.command(
    "evaluate",
    summary="score a labelled dataset with a trained model and write its ROC",
    arguments=[
        CONFIG,
        Arg.of("model", help="model file written by train"),
        Arg.of("dataset", help="labelled test CSV"),
        FORCE,
    ],
)
def cmd_evaluate(config: str, model: str, dataset: str, force: bool = False) -> Manifest:
    rc = load_run_config(config)
    m_repos, m_name = get_input_repository(model)
    verifier = m_repos.models.load(m_name, rc)
    if verifier.threshold is None:
        raise ConfigException(f"{model} carries no calibrated threshold; train it again")
    d_repos, d_name = get_input_repository(dataset)
    data = d_repos.datasets.load(d_name, k_f=rc.channel.k_f)
    inputs = {model: m_repos.models.sha256(m_name), dataset: d_repos.datasets.sha256(d_name)}

    test_h0, test_h1 = data.of_label(RegionLabel.H0), data.of_label(RegionLabel.H1)
    if len(test_h0) == 0 or len(test_h1) == 0:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, f"{dataset} needs H0 and H1 rows, got {data.counts()}")

    repos = get_repository_factory(rc.output.dir, force)
    repos.storage.check_writable(f"evaluation/{ROC_NAME}", manifest_name("evaluate"))

    s0, s1 = verifier.score(test_h0), verifier.score(test_h1)
    curve = roc_from_scores(s0, s1, rc.eval.n_thresholds, metadata={"name": rc.name, "model": rc.model.kind.value})
    rates = rates_at(s0, s1, verifier.threshold)
    point = {
        "threshold": verifier.threshold,
        "target_fa": rc.eval.target_fa,
        "curve_p_md_at_target": md_at_fa(curve, rc.eval.target_fa),
        **rates.to_dict(),
    }
    repos.runs.save_curve(f"evaluation/{ROC_NAME}", curve)
    repos.runs.save_report("evaluation/operating_point.json", point)

    manifest = new_manifest(
        "evaluate", rc, inputs=inputs,
        results={
            "auc": auc(curve),
            "operating_point": point,
            "operating_points": operating_points(curve, rc.eval.report_fa),
        },
    )
    repos.runs.save_manifest(manifest)
    logger.info(f"✅ evaluate: AUC {auc(curve):.4f}, FA {rates.p_fa:.4f}, MD {rates.p_md:.4f}")
    return manifest


# ==========================
# roc
# ==========================
@router.command(
    "roc",
    summary="simulate, train and sweep every map of the configuration, then average the curves",
    arguments=[CONFIG, GRID, JOBS, FORCE],
)
def cmd_roc(config: str, grid: Optional[str] = None, jobs: Optional[int] = None, force: bool = False) -> Manifest:
    rc = load_run_config(config)
    repos = get_repository_factory(rc.output.dir, force)
    repos.storage.check_writable(ROC_NAME, manifest_name("roc"))

    result, inputs = run_recorded(rc, repos, grid, jobs)
    if export_metrics(rc):
        repos.runs.save_metrics(METRICS_NAME)
    manifest = new_manifest(
        "roc", rc, map_indices=range(rc.eval.n_maps), inputs=inputs, results=result.summary(),
    )
    repos.runs.save_manifest(manifest)
    return manifest
