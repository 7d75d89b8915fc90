from unittest.mock import patch

import numpy as np
import pytest

from irlv.core.exceptions import ConfigException, DataException, NumericException
from irlv.enums import ErrorCodeEnum, ModelKind
from irlv.services.channel import AttenuationDataset
from irlv.services.evaluation import (
    Experiment,
    ExperimentService,
    VerifierFactory,
    auc,
    evaluate_map,
    run_experiment,
    simulate_map,
)


def _ring_experiment(kind="np", **overrides) -> Experiment:
    config = {
        "name": f"ring-{kind}",
        "scenario": {"kind": "ring", "r_min": 0.1, "r_in": 2.0, "r_out": 10.0},
        "channel": {"nu": 2.0, "fading": True},
        "model": {"kind": kind},
        "training": {"n_points": 400},
        "eval": {"n_test_h0": 300, "n_test_h1": 300, "n_thresholds": 200},
        "seed": 11,
    }
    config.update(overrides)
    return Experiment.model_validate(config)


def _urban_experiment(kind, **overrides) -> Experiment:
    config = {
        "name": f"urban-{kind}",
        "scenario": {"kind": "urban", "n_aps": 3},
        "channel": {"nu": 2.0},
        "model": {"kind": kind, "mlp": {"learning_rate": 0.5, "epochs": 100}},
        "training": {"n_points": 300},
        "eval": {"n_test_h0": 200, "n_test_h1": 200, "n_thresholds": 200},
        "seed": 5,
    }
    config.update(overrides)
    return Experiment.model_validate(config)


# 每种判决器在小场景上都优于随机猜测
@pytest.mark.parametrize("experiment", [
    _ring_experiment("np"),
    _ring_experiment("np-quantized", model={"kind": "np-quantized", "quantized": {"n_levels": 30}}),
    _ring_experiment("glrt"),
    _urban_experiment("mlp-ce"),
    _urban_experiment("mlp-mse"),
    _urban_experiment("lssvm"),
    _urban_experiment("oclssvm"),
    _urban_experiment("autoencoder"),
    _urban_experiment("glrt"),
    _urban_experiment("eda"),
], ids=lambda e: e.name)
def test_verifier_beats_chance(experiment):
    data = simulate_map(experiment, 0)
    verifier = VerifierFactory.create(experiment, seed=3)
    result = evaluate_map(experiment, verifier, data.train, data.validation, data.test)
    assert auc(result.curve) > 0.6
    assert result.threshold is not None
    assert 0.0 <= result.rates.p_fa <= 1.0


def test_calibrated_threshold_meets_target_on_validation():
    exp = _ring_experiment("np")
    data = simulate_map(exp, 0)
    verifier = VerifierFactory.create(exp)
    verifier.fit(data.train, data.validation)
    h0 = data.validation.of_label(-1)
    threshold = verifier.calibrate(h0, 0.1)
    assert np.mean(verifier.score(h0) > threshold) <= 0.1
    assert set(np.unique(verifier.decide(data.test))) <= {-1, 1}


# 测试模型文件的保存与恢复
@pytest.mark.parametrize("experiment", [
    _urban_experiment("lssvm"),
    _ring_experiment("np-quantized", model={"kind": "np-quantized", "quantized": {"n_levels": 30}}),
], ids=lambda e: e.name)
def test_dump_and_load_keep_scores(experiment):
    data = simulate_map(experiment, 0)
    verifier = VerifierFactory.create(experiment, seed=1)
    verifier.fit(data.train, data.validation)
    verifier.calibrate(data.validation.of_label(-1), 0.1)
    restored = VerifierFactory.load(experiment, verifier.dump())
    assert np.array_equal(restored.score(data.test), verifier.score(data.test))
    assert restored.threshold == verifier.threshold


def test_load_rejects_another_model_kind():
    lssvm = _urban_experiment("lssvm")
    data = simulate_map(lssvm, 0)
    verifier = VerifierFactory.create(lssvm)
    verifier.fit(data.train)
    with pytest.raises(DataException) as exc:
        VerifierFactory.load(_urban_experiment("oclssvm"), verifier.dump())
    assert exc.value.code_enum is ErrorCodeEnum.BAD_MODEL_FILE


def test_one_class_verifier_refuses_h1_rows():
    exp = _urban_experiment("oclssvm")
    data = simulate_map(_urban_experiment("lssvm"), 0)
    with pytest.raises(DataException) as exc:
        VerifierFactory.create(exp).fit(data.train)
    assert exc.value.code_enum is ErrorCodeEnum.H1_ROWS_PRESENT


def test_verifier_checks_state_and_dimensions():
    exp = _urban_experiment("lssvm")
    verifier = VerifierFactory.create(exp)
    assert verifier.kind is ModelKind.LSSVM
    wrong = AttenuationDataset(np.zeros((4, 2)), np.ones((4, 2)), np.array([-1, 1, -1, 1]))
    with pytest.raises(ConfigException):
        verifier.score(wrong)
    with pytest.raises(DataException) as exc:
        verifier.fit(wrong)
    assert exc.value.code_enum is ErrorCodeEnum.DIMENSION_MISMATCH


# 测试实验流程
def test_map_data_is_reproducible():
    exp = _ring_experiment("np")
    first, again, other = simulate_map(exp, 0), simulate_map(exp, 0), simulate_map(exp, 1)
    assert np.array_equal(first.train.a, again.train.a)
    assert np.array_equal(first.test.positions, again.test.positions)
    assert not np.array_equal(first.train.a, other.train.a)
    assert len(first.train) + len(first.validation) == 400
    assert first.test.counts() == {"h0": 300, "h1": 300}


def test_one_class_training_positions_lie_in_the_roi():
    exp = _urban_experiment("oclssvm")
    data = simulate_map(exp, 0)
    assert np.all(data.train.labels == -1)
    assert np.all(data.validation.labels == -1)


def test_run_experiment_averages_maps():
    exp = _ring_experiment("np", eval={"n_test_h0": 300, "n_test_h1": 300, "n_maps": 2, "n_thresholds": 200})
    result = run_experiment(exp, jobs=1)
    summary = result.summary()
    assert summary["n_maps"] == 2
    assert summary["skipped_maps"] == 0
    assert set(summary) == {"n_maps", "skipped_maps", "auc", "operating_points", "target_fa", "calibrated", "maps"}
    assert result.curve.metadata["n_curves"] == 2
    assert result.rates.n_h0 == 600
    assert run_experiment(exp, jobs=1).summary()["auc"] == summary["auc"]


def test_failed_maps_are_skipped():
    exp = _ring_experiment("np", eval={"n_test_h0": 100, "n_test_h1": 100, "n_maps": 2})
    real = simulate_map

    def flaky(e, i, grid=None, solver=None):
        if i == 1:
            raise NumericException(ErrorCodeEnum.NOT_CONVERGED, "did not converge")
        return real(e, i, solver)

    with patch("irlv.services.evaluation.experiment_service.map_data", side_effect=flaky):
        result = ExperimentService(jobs=1).run(exp)
    assert result.skipped == 1
    assert result.summary()["maps"][1]["error"] is not None


def test_all_maps_skipped_is_an_error():
    exp = _ring_experiment("np", eval={"n_test_h0": 100, "n_test_h1": 100, "n_maps": 2})
    with patch(
        "irlv.services.evaluation.experiment_service.map_data",
        side_effect=DataException(ErrorCodeEnum.NON_FINITE, "bad draws"),
    ):
        with pytest.raises(NumericException) as exc:
            ExperimentService(jobs=1).run(exp)
    assert exc.value.code_enum is ErrorCodeEnum.ALL_MAPS_SKIPPED


def test_grid_experiment_needs_ingested_grid(tmp_path):
    exp = _urban_experiment("lssvm", grid={"path": str(tmp_path / "grid.csv"), "n_train": 100})
    with pytest.raises(ConfigException):
        ExperimentService(jobs=1).run(exp)
