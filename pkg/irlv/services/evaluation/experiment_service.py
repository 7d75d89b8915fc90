# irlv/services/evaluation/experiment_service.py
"""
Map-averaged ROC experiments.

Each shadowing map is an independent work unit with its own random streams
derived from (seed, map index): positions, channel draws and the
train/validation split. Maps run in a process pool and are reduced in index
order, so the result does not depend on the number of workers.
"""
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from irlv.config.config_settings.config_schema import ShadowingSolverConfig
from irlv.config.settings import settings
from irlv.core.exceptions import ConfigException, IrlvException, NumericException
from irlv.core.logger import get_logger
from irlv.enums import ErrorCodeEnum, RegionLabel
from irlv.metrics.run_metrics import scoring_duration, skipped_maps, training_duration
from irlv.schemas.run import Experiment
from irlv.services._base_service import BaseService
from irlv.services.channel import AttenuationDataset, ShadowingMap, build_dataset, generate_shadowing_map
from irlv.services.data import GridDataset
from irlv.services.evaluation.roc import (
    RateEstimate,
    RocCurve,
    auc,
    average_curves,
    operating_points,
    pooled_rates,
    rates_at,
    roc_from_scores,
)
from irlv.services.evaluation.verifiers import Verifier, VerifierFactory, channel_params

logger = get_logger(__name__)


@dataclass
class MapResult:
    map_index: int
    seed: List[int]
    curve: Optional[RocCurve] = None
    threshold: Optional[float] = None
    rates: Optional[RateEstimate] = None
    report: dict = field(default_factory=dict)
    train_seconds: float = 0.0
    score_seconds: float = 0.0
    error: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class ExperimentResult:
    experiment: Experiment
    curve: RocCurve
    maps: List[MapResult]

    @property
    def curves(self) -> List[RocCurve]:
        return [m.curve for m in self.maps if m.ok]

    @property
    def skipped(self) -> int:
        return sum(not m.ok for m in self.maps)

    @property
    def rates(self) -> RateEstimate:
        """Pooled error rates at the thresholds calibrated on each map's validation H0 scores."""
        return pooled_rates([m.rates for m in self.maps if m.ok])

    def summary(self) -> dict:
        return {
            "n_maps": len(self.maps),
            "skipped_maps": self.skipped,
            "auc": auc(self.curve),
            "operating_points": operating_points(self.curve, self.experiment.eval.report_fa),
            "target_fa": self.experiment.eval.target_fa,
            "calibrated": self.rates.to_dict(),
            "maps": [
                {"map": m.map_index, "seed": m.seed, "threshold": m.threshold, "report": m.report, "error": m.error}
                for m in self.maps
            ],
        }


def map_seed(seed: int, map_index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, map_index])


class MapData(NamedTuple):
    train: AttenuationDataset
    validation: AttenuationDataset
    test: AttenuationDataset
    shadowing: Optional[ShadowingMap] = None


# --- 单张地图的数据 ---
def simulate_map(
    exp: Experiment,
    map_index: int,
    solver: Optional[ShadowingSolverConfig] = None,
) -> MapData:
    """
    Training, validation and test vectors sharing one shadowing map.

    One-class kinds draw their training positions from the ROI only; test
    positions are drawn per hypothesis with the configured sizes.
    """
    place_ss, channel_ss, split_ss = map_seed(exp.seed, map_index).spawn(3)
    place, channel, split = (np.random.default_rng(s) for s in (place_ss, channel_ss, split_ss))
    scenario, params = exp.scenario, channel_params(exp)
    train_region = RegionLabel.H0 if exp.model.kind.one_class else None

    n_train = exp.training.n_points
    positions = np.vstack([
        scenario.sample_uniform(train_region, place, n_train),
        scenario.sample_uniform(RegionLabel.H0, place, exp.eval.n_test_h0),
        scenario.sample_uniform(RegionLabel.H1, place, exp.eval.n_test_h1),
    ])
    shadowing = generate_shadowing_map(
        params, positions, channel, n_aps=scenario.n_aps, solver=solver or settings.shadowing,
        bounding_box=scenario.bounding_box(),
    )
    data = build_dataset(
        scenario, params, shadowing, len(positions), exp.channel.k_f, None, channel,
        fading=exp.channel.fading, positions=positions,
    )
    validation, train = data.subset(slice(0, n_train)).split(exp.training.validation_fraction, split)
    return MapData(train, validation, data.subset(slice(n_train, None)), shadowing)


def grid_map(exp: Experiment, grid: GridDataset) -> MapData:
    """Measured cells split into training and test; one-class kinds keep only the ROI cells for training."""
    split_ss = map_seed(exp.seed, 0)
    rng = np.random.default_rng(split_ss)
    train_all, test = grid.split(exp.grid.n_train, rng)
    if exp.model.kind.one_class:
        train_all = train_all.of_label(RegionLabel.H0)
    validation, train = train_all.split(exp.training.validation_fraction, rng)
    return MapData(train, validation, test)


def map_data(exp: Experiment, map_index: int, grid: Optional[GridDataset] = None,
             solver: Optional[ShadowingSolverConfig] = None) -> MapData:
    if grid is not None:
        return grid_map(exp, grid)
    return simulate_map(exp, map_index, solver)


# --- 单张地图的评估 ---
def evaluate_map(
    exp: Experiment,
    verifier: Verifier,
    train: AttenuationDataset,
    validation: AttenuationDataset,
    test: AttenuationDataset,
    metadata: Optional[dict] = None,
) -> MapResult:
    """Fit, calibrate on validation H0, sweep the ROC on test data."""
    result = MapResult(map_index=(metadata or {}).get("map", 0), seed=(metadata or {}).get("seed", []))
    start = time.perf_counter()
    result.report = verifier.fit(train, validation)
    result.train_seconds = time.perf_counter() - start

    calibration = validation.of_label(RegionLabel.H0)
    if len(calibration) == 0:
        logger.warning("⚠️ validation split holds no H0 vectors, calibrating on the training H0 vectors")
        calibration = train.of_label(RegionLabel.H0)
    result.threshold = verifier.calibrate(calibration, exp.eval.target_fa)

    test_h0, test_h1 = test.of_label(RegionLabel.H0), test.of_label(RegionLabel.H1)
    start = time.perf_counter()
    s0, s1 = verifier.score(test_h0), verifier.score(test_h1)
    result.score_seconds = time.perf_counter() - start

    result.curve = roc_from_scores(s0, s1, exp.eval.n_thresholds, metadata=metadata)
    result.rates = rates_at(s0, s1, result.threshold)
    return result


def run_map(exp: Experiment, map_index: int, grid: Optional[GridDataset] = None,
            solver: Optional[ShadowingSolverConfig] = None) -> MapResult:
    """One work unit; data or numeric failures are reported, configuration errors propagate."""
    ss = map_seed(exp.seed, map_index)
    seed_info = [exp.seed, map_index]
    metadata = {"name": exp.name, "model": exp.model.kind.value, "map": map_index, "seed": seed_info}
    try:
        data = map_data(exp, map_index, grid, solver)
        verifier = VerifierFactory.create(exp, seed=int(ss.generate_state(1)[0]))
        return evaluate_map(exp, verifier, data.train, data.validation, data.test, metadata)
    except ConfigException:
        raise
    except IrlvException as e:
        logger.warning(f"⚠️ map {map_index} skipped: {e}")
        return MapResult(map_index=map_index, seed=seed_info, error=e.to_dict())


class ExperimentService(BaseService):
    """Runs every map of an experiment and averages the curves."""

    def __init__(self, app_config=None, jobs: Optional[int] = None):
        super().__init__(app_config)
        self.jobs = jobs or self.settings.runner.jobs

    def _run_maps(self, exp: Experiment, grid: Optional[GridDataset]) -> List[MapResult]:
        indices = range(exp.eval.n_maps)
        solver = self.settings.shadowing
        workers = min(self.jobs, exp.eval.n_maps)
        if workers <= 1:
            return [run_map(exp, i, grid, solver) for i in indices]
        self.logger.info(f"🚀 {exp.eval.n_maps} maps on {workers} worker processes")
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_map, exp, i, grid, solver) for i in indices]
            return [f.result() for f in futures]

    def run(self, exp: Experiment, grid: Optional[GridDataset] = None) -> ExperimentResult:
        if exp.grid is not None and grid is None:
            raise ConfigException("the experiment reads a measured grid; ingest it first")
        kind = exp.model.kind.value
        self.logger.info(f"🧪 {exp.name}: {kind}, {exp.eval.n_maps} map(s), S={exp.training.n_points}, k_f={exp.channel.k_f}")
        maps = self._run_maps(exp, grid)

        # 指标在父进程中按地图顺序记录
        for m in maps:
            if m.ok:
                training_duration.labels(model_kind=kind).observe(m.train_seconds)
                scoring_duration.labels(model_kind=kind).observe(m.score_seconds)
            else:
                skipped_maps.labels(model_kind=kind).inc()

        curves = [m.curve for m in maps if m.ok]
        if not curves:
            raise NumericException(
                ErrorCodeEnum.ALL_MAPS_SKIPPED,
                message=f"all {len(maps)} map(s) of '{exp.name}' failed",
                extra={"errors": [m.error for m in maps][:5]},
            )
        if len(maps) - len(curves):
            self.logger.warning(f"⚠️ {len(maps) - len(curves)} of {len(maps)} map(s) skipped")
        meta = {"name": exp.name, "model": kind, "n_maps": len(curves)}
        curve = curves[0] if len(curves) == 1 else average_curves(curves, metadata=meta)
        result = ExperimentResult(exp, curve, maps)
        self.logger.info(f"✅ {exp.name}: AUC {auc(curve):.4f}, calibrated {result.rates.as_tuple()}")
        return result


def run_experiment(exp: Experiment, jobs: Optional[int] = None, grid: Optional[GridDataset] = None) -> ExperimentResult:
    return ExperimentService(jobs=jobs).run(exp, grid)
