import numpy as np
import pytest

from irlv.core.exceptions import DataException
from irlv.enums import ErrorCodeEnum
from irlv.services.evaluation import (
    RateEstimate,
    RocCurve,
    auc,
    average_curves,
    calibrate_threshold,
    estimate_rates,
    md_at_fa,
    operating_points,
    pooled_rates,
    rates_at,
    roc_from_scores,
    wilson_interval,
)


# 测试阈值校准: 100 个分数, 目标 0.1, 恰好 10 个虚警
def test_calibration_gives_exact_false_alarm_count():
    scores = np.arange(1.0, 101.0)
    threshold = calibrate_threshold(scores, 0.1)
    assert int(np.sum(scores > threshold)) == 10
    assert threshold == 90.0


def test_calibration_never_exceeds_target_with_ties():
    scores = np.array([1.0, 2.0, 2.0, 2.0, 3.0])
    threshold = calibrate_threshold(scores, 0.4)
    assert np.mean(scores > threshold) <= 0.4


def test_calibration_edge_cases():
    assert np.mean(np.arange(10.0) > calibrate_threshold(np.arange(10.0), 1.0)) == 1.0
    assert calibrate_threshold(np.arange(10.0), 0.01) == 9.0
    with pytest.raises(DataException) as exc:
        calibrate_threshold([], 0.1)
    assert exc.value.code_enum is ErrorCodeEnum.EMPTY_CLASS


# 测试 ROC 曲线
def test_roc_contains_both_corners():
    curve = roc_from_scores(np.array([0.1, 0.4, 0.35]), np.array([0.8, 0.3, 0.9]))
    points = set(zip(curve.p_fa.tolist(), curve.p_md.tolist()))
    assert (1.0, 0.0) in points
    assert (0.0, 1.0) in points
    assert np.all(np.diff(curve.thresholds) > 0)


def test_auc_extremes(rng):
    separated = roc_from_scores(rng.normal(0.0, 1.0, 500), rng.normal(10.0, 1.0, 500))
    assert auc(separated) == pytest.approx(1.0)
    same = roc_from_scores(rng.normal(0.0, 1.0, 5000), rng.normal(0.0, 1.0, 5000))
    assert auc(same) == pytest.approx(0.5, abs=0.03)


def test_roc_thins_interior_thresholds(rng):
    curve = roc_from_scores(rng.normal(size=1000), rng.normal(1.0, 1.0, 1000), n_thresholds=50)
    assert len(curve) <= 52


def test_roc_rejects_non_finite_and_empty():
    with pytest.raises(DataException):
        roc_from_scores(np.array([np.nan]), np.array([1.0]))
    with pytest.raises(DataException):
        roc_from_scores(np.array([]), np.array([1.0]))


def test_md_at_fa_interpolates():
    curve = RocCurve([0.0, 1.0, 2.0], [1.0, 0.5, 0.0], [0.0, 0.2, 1.0], 10, 10)
    assert md_at_fa(curve, 0.5) == pytest.approx(0.2)
    assert md_at_fa(curve, 0.25) == pytest.approx(0.6)
    assert [p["p_fa"] for p in operating_points(curve, [0.1, 0.5])] == [0.1, 0.5]


def test_average_of_identical_curves(rng):
    curve = roc_from_scores(rng.normal(size=300), rng.normal(1.5, 1.0, 300))
    avg = average_curves([curve, curve, curve])
    assert auc(avg) == pytest.approx(auc(curve), abs=1e-3)
    assert avg.n_h0 == 900
    assert avg.metadata["n_curves"] == 3


def test_average_needs_curves():
    with pytest.raises(DataException):
        average_curves([])


# 测试错误率与置信区间
def test_wilson_interval():
    lo, hi = wilson_interval(0, 10)
    assert lo == 0.0 and 0.0 < hi < 0.35
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert (lo + hi) / 2.0 == pytest.approx(0.5)


def test_rates_at_threshold():
    rates = rates_at(np.array([0.0, 1.0, 2.0, 3.0]), np.array([2.5, 3.5, 0.5]), 1.5)
    assert rates.as_tuple() == (0.5, pytest.approx(1.0 / 3.0))
    assert rates.p_fa_ci[0] <= rates.p_fa <= rates.p_fa_ci[1]


def test_estimate_rates_checks_inputs():
    rates = estimate_rates([1, -1, 1, -1], [-1, -1, 1, 1])
    assert rates.as_tuple() == (0.5, 0.5)
    with pytest.raises(DataException) as exc:
        estimate_rates([1, -1], [-1])
    assert exc.value.code_enum is ErrorCodeEnum.DIMENSION_MISMATCH
    with pytest.raises(DataException):
        estimate_rates([1, 1], [1, 1])


def test_pooled_rates_use_counts():
    a = RateEstimate(0.1, 0.2, 100, 50, (0.0, 1.0), (0.0, 1.0))
    b = RateEstimate(0.3, 0.0, 100, 150, (0.0, 1.0), (0.0, 1.0))
    pooled = pooled_rates([a, b])
    assert pooled.as_tuple() == (pytest.approx(0.2), pytest.approx(10.0 / 200.0))
    assert (pooled.n_h0, pooled.n_h1) == (200, 200)
