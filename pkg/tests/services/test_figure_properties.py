"""
Figure-level properties checked at desk scale. Every test runs full
experiments and is marked slow; run them with ``pytest -m slow``.
"""
import numpy as np
import pytest
from scipy.stats import kendalltau

from irlv.enums import LlrVariant, RegionLabel
from irlv.services.evaluation import Experiment, auc, md_at_fa, run_experiment, simulate_map
from irlv.services.learning import score, train_twoclass
from irlv.services.nptest import LlrModel, llr_fading_nu2

pytestmark = pytest.mark.slow

_RING = {"kind": "ring", "r_min": 0.1, "r_in": 2.0, "r_out": 10.0}
_URBAN5 = {"kind": "urban", "n_aps": 5, "roi": {"d1": 50.0, "d2": 50.0, "beta1": 150.0, "beta2": 150.0}}


def _experiment(name, scenario, channel, model, n_points, n_test, n_maps=1, seed=1) -> Experiment:
    return Experiment.model_validate({
        "name": name,
        "scenario": scenario,
        "channel": channel,
        "model": model,
        "training": {"n_points": n_points},
        "eval": {"n_test_h0": n_test, "n_test_h1": n_test, "n_maps": n_maps, "n_thresholds": None},
        "seed": seed,
    })


def _md(exp: Experiment, p_fa: float, jobs: int = 2) -> float:
    return md_at_fa(run_experiment(exp, jobs=jobs).curve, p_fa)


def _binomial_gap(p: float, q: float, n: int) -> float:
    """Three standard errors of the difference of two independent rates estimated from n trials each."""
    return 3.0 * np.sqrt((p * (1 - p) + q * (1 - q)) / n)


# 环形场景: MLP 与 LS-SVM 逼近 NP 检验
def test_learned_verifiers_match_the_np_test_on_the_ring():
    channel = {"nu": 2.0, "sigma_s_db": 0.0, "shadowing": "none", "fading": True}
    n_test = 20_000
    np_curve = run_experiment(_experiment("np", _RING, channel, {"kind": "np"}, 2000, n_test, seed=2)).curve
    mlp = _experiment(
        "mlp", _RING, channel,
        {"kind": "mlp-ce", "mlp": {"hidden": [5, 5], "learning_rate": 0.1, "epochs": 40}}, 10_000, n_test, seed=2,
    )
    lssvm = _experiment("lssvm", _RING, channel, {"kind": "lssvm"}, 4000, n_test, seed=2)
    for exp in (mlp, lssvm):
        curve = run_experiment(exp).curve
        for p_fa in (0.05, 0.1, 0.2):
            assert abs(md_at_fa(curve, p_fa) - md_at_fa(np_curve, p_fa)) <= 0.03, (exp.name, p_fa)


# 环形场景上 NP 检验的排序
def test_np_orderings_on_the_ring():
    n_test = 20_000

    def np_md(channel, seed):
        return _md(_experiment("np", _RING, channel, {"kind": "np"}, 10, n_test, seed=seed), 0.1)

    fading_nu2 = np_md({"nu": 2.0, "shadowing": "none", "fading": True}, 2)
    fading_nu3 = np_md({"nu": 3.0, "shadowing": "none", "fading": True}, 3)
    shadowed = [
        np_md({"nu": 2.0, "sigma_s_db": sigma, "shadowing": "uncorrelated"}, 4) for sigma in (0.1, 1.8, 6.0)
    ]

    # 路损指数越大, 衰落下的漏检越少
    assert fading_nu2 - fading_nu3 > _binomial_gap(fading_nu2, fading_nu3, n_test)
    # 阴影越强, 漏检越多
    for lo, hi in zip(shadowed[:-1], shadowed[1:]):
        assert hi - lo > _binomial_gap(lo, hi, n_test)
    # 衰落比 1.8 dB 阴影影响更大
    for faded in (fading_nu2, fading_nu3):
        assert faded - shadowed[1] > _binomial_gap(faded, shadowed[1], n_test)


# 单 AP 城市场景: 量化直方图 NP 与小训练集学习方法相近
def test_quantized_np_stays_close_to_learned_verifiers():
    urban1 = {**_URBAN5, "n_aps": 1}
    channel = {"nu": 2.0, "sigma_s_db": 8.0, "d_c": 75.0, "shadowing": "points"}
    quantized = _experiment(
        "np-quantized", urban1, channel, {"kind": "np-quantized", "quantized": {"n_levels": 300}},
        20_000, 2000, n_maps=20, seed=5,
    )
    mlp = _experiment(
        "mlp", urban1, channel, {"kind": "mlp-ce", "mlp": {"hidden": [5], "learning_rate": 0.5, "epochs": 200}},
        1000, 2000, n_maps=20, seed=5,
    )
    md_quantized = _md(quantized, 0.1, jobs=4)
    md_mlp = _md(mlp, 0.1, jobs=4)
    assert abs(md_mlp - md_quantized) <= 0.1


# 十个 AP: 训练集增大一个数量级后漏检不变差
def test_more_training_data_does_not_hurt():
    urban10 = {
        "kind": "urban",
        "roi": {"d1": 50.0, "d2": 50.0, "beta1": 150.0, "beta2": 150.0},
        "aps": [[270.0, 5.0], [270.0, 535.0], [5.0, 270.0], [535.0, 270.0], [270.0, 127.5],
                [270.0, 412.5], [127.5, 270.0], [412.5, 270.0], [270.0, 470.0], [470.0, 270.0]],
    }
    channel = {"nu": 2.0, "sigma_s_db": 8.0, "d_c": 75.0, "shadowing": "points", "fading": True, "k_f": 1}
    small = _md(_experiment("s500", urban10, channel, {"kind": "lssvm"}, 500, 4000, n_maps=3, seed=6), 0.1)
    large = _md(_experiment("s5000", urban10, channel, {"kind": "lssvm"}, 5000, 4000, n_maps=3, seed=6), 0.1)
    assert large <= small


# 五个 AP: k_f = 10 的衰落平均使漏检至少降为五分之一
def test_fading_average_cuts_missed_detections():
    def md(k_f):
        channel = {"sigma_s_db": 8.0, "shadowing": "points", "fading": True, "k_f": k_f}
        return _md(_experiment(f"kf{k_f}", _URBAN5, channel, {"kind": "lssvm"}, 3000, 20_000, n_maps=3, seed=8), 0.2)

    md_kf1, md_kf10 = md(1), md(10)
    assert md_kf1 >= 5.0 * md_kf10
    assert md_kf1 > 0


# 无衰落城市场景: 学习方法的 AUC 明显高于 EDA
def test_learned_verifiers_dominate_eda():
    channel = {"sigma_s_db": 8.0, "shadowing": "points", "fading": False}
    eda = _experiment(
        "eda", _URBAN5, channel, {"kind": "eda", "eda": {"n_starts": 3}}, 1000, 1500, n_maps=2, seed=9,
    )
    eda_auc = auc(run_experiment(eda, jobs=2).curve)
    for kind in ("lssvm", "oclssvm"):
        learned = _experiment(kind, _URBAN5, channel, {"kind": kind}, 1000, 1500, n_maps=2, seed=9)
        assert auc(run_experiment(learned, jobs=2).curve) >= eda_auc + 0.05, kind


# 两类 LS-SVM 不差于单类 OC-LS-SVM
def test_two_class_beats_one_class():
    channel = {"sigma_s_db": 8.0, "shadowing": "points", "fading": True, "k_f": 10}
    n_test = 4000
    two = _md(_experiment("lssvm", _URBAN5, channel, {"kind": "lssvm"}, 2000, n_test, n_maps=3, seed=10), 0.1)
    one = _md(_experiment("oclssvm", _URBAN5, channel, {"kind": "oclssvm"}, 2000, n_test, n_maps=3, seed=10), 0.1)
    assert two <= one + _binomial_gap(two, one, 3 * n_test) / 3.0


# LS-SVM 得分与 NP 对数似然比排序一致
def test_lssvm_ranking_follows_the_llr():
    exp = _experiment(
        "lssvm", _RING, {"nu": 2.0, "shadowing": "none", "fading": True}, {"kind": "lssvm"}, 5000, 10, seed=12,
    )
    train = simulate_map(exp, 0).train
    model = train_twoclass(train)
    h0 = train.of_label(RegionLabel.H0).a[:, 0]
    h1 = train.of_label(RegionLabel.H1).a[:, 0]
    grid = np.logspace(*np.log10([np.quantile(h0, 0.05), np.quantile(h1, 0.5)]), 200)
    llr = llr_fading_nu2(LlrModel(variant=LlrVariant.FADING_NU2, nu=2.0), grid)
    tau, _ = kendalltau(score(model, grid), -llr)
    assert tau >= 0.99
