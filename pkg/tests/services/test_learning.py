import numpy as np
import pytest

from irlv.core.exceptions import ConfigException, DataException
from irlv.enums import Activation, ErrorCodeEnum, LossKind, RegionLabel, SvmVariant
from irlv.schemas.learning import KernelConfig, MlpConfig, autoencoder_config, classifier_config
from irlv.services.channel import AttenuationDataset, build_dataset, db_to_linear
from irlv.services.learning import (
    FeatureScaler,
    MlpModel,
    ae_decide,
    ae_score,
    classify,
    dump_mlp,
    dump_svm,
    forward,
    glorot_init,
    kernel,
    load_mlp,
    load_svm,
    loss_and_gradients,
    objective,
    oc_score,
    rank_auc,
    score,
    svm_decide,
    train_autoencoder,
    train_ce,
    train_mse,
    train_oneclass,
    train_twoclass,
    weight_norm_sq,
)


def _ring_data(ring, params, rng, n=400):
    return build_dataset(ring, params, None, n, 1, None, rng)


def _numeric_gradient(weights, biases, activations, x, targets, loss, eps=1e-6):
    grad_w = []
    for l, w in enumerate(weights):
        g = np.zeros_like(w)
        for idx in np.ndindex(w.shape):
            orig = w[idx]
            w[idx] = orig + eps
            up = loss_and_gradients(weights, biases, activations, x, targets, loss)[0]
            w[idx] = orig - eps
            down = loss_and_gradients(weights, biases, activations, x, targets, loss)[0]
            w[idx] = orig
            g[idx] = (up - down) / (2 * eps)
        grad_w.append(g)
    grad_b = []
    for b in biases:
        g = np.zeros_like(b)
        for i in range(b.size):
            orig = b[i]
            b[i] = orig + eps
            up = loss_and_gradients(weights, biases, activations, x, targets, loss)[0]
            b[i] = orig - eps
            down = loss_and_gradients(weights, biases, activations, x, targets, loss)[0]
            b[i] = orig
            g[i] = (up - down) / (2 * eps)
        grad_b.append(g)
    return grad_w, grad_b


def _rel_error(a, b):
    a, b = np.concatenate([v.ravel() for v in a]), np.concatenate([v.ravel() for v in b])
    return np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12)


def _random_network(case: int):
    """Architecture, activations and loss of one random gradient-check case; losses rotate CE, MSE, reconstruction."""
    rng = np.random.default_rng(1000 + case)
    loss = (LossKind.CE, LossKind.MSE, LossKind.RECONSTRUCTION)[case % 3]
    if loss is LossKind.RECONSTRUCTION:
        n_in = int(rng.integers(2, 5))
        code = int(rng.integers(1, n_in))
        sizes = [n_in, code, n_in] if rng.random() < 0.5 else [n_in, n_in + 1, code, n_in + 1, n_in]
        activations = [Activation.SIGMOID] * (len(sizes) - 1)
        activations[(len(sizes) - 2) // 2] = Activation.LINEAR
    else:
        hidden = [int(h) for h in rng.integers(1, 6, size=int(rng.integers(1, 4)))]
        sizes = [int(rng.integers(1, 5)), *hidden, 1]
        activations = [Activation.SIGMOID] * (len(sizes) - 1)
    return loss, sizes, activations, rng


# 反向传播与有限差分一致, 20 组随机网络
@pytest.mark.parametrize("case", range(20))
def test_gradients_match_finite_differences(case):
    loss, sizes, activations, rng = _random_network(case)
    weights, biases = glorot_init(sizes, rng)
    biases = [rng.normal(0.0, 0.1, b.shape) for b in biases]
    x = rng.normal(size=(7, sizes[0]))
    if loss is LossKind.RECONSTRUCTION:
        targets = x
    else:
        targets = rng.integers(0, 2, (7, 1)).astype(float)
    _, grad_w, grad_b = loss_and_gradients(weights, biases, activations, x, targets, loss)
    num_w, num_b = _numeric_gradient(weights, biases, activations, x, targets, loss)
    assert _rel_error(grad_w + grad_b, num_w + num_b) <= 1e-5


def test_mlp_config_validation():
    with pytest.raises(ValueError):
        MlpConfig(layer_sizes=[3, 2, 1], activations=[Activation.SIGMOID])
    with pytest.raises(ValueError):
        MlpConfig(layer_sizes=[3, 0, 1])
    with pytest.raises(ValueError):
        MlpConfig(layer_sizes=[3, 2, 1], linear_layers=[5])
    ae = autoencoder_config(7)
    assert ae.layer_sizes == [7, 7, 6, 3, 2, 3, 6, 7, 7]
    assert ae.activation_schedule()[3] is Activation.LINEAR


# 测试 MLP 分类器
@pytest.mark.parametrize("trainer", [train_ce, train_mse])
def test_mlp_separates_noiseless_ring(ring, params, rng, trainer):
    train = _ring_data(ring, params, rng, 600)
    test = _ring_data(ring, params, rng, 600)
    config = classifier_config(1, [5], learning_rate=0.5, epochs=150, seed=3)
    model = trainer(config, train)
    scores = forward(model, test)
    assert rank_auc(scores[test.labels == -1], scores[test.labels == 1]) > 0.95
    assert model.loss_trace[-1] < model.loss_trace[0]
    assert classify(model, float(test.a[0, 0]), 0.5) in (-1, 1)
    assert isinstance(forward(model, float(test.a[0, 0])), float)


def test_mlp_memorizes_a_single_point():
    data = AttenuationDataset(np.zeros((1, 2)), np.array([1e6]), np.array([1]))
    model = train_mse(classifier_config(1, [3], learning_rate=1.0, epochs=500, batch_size=None), data)
    assert model.loss_trace[-1] <= 1e-4
    assert np.all(np.diff(model.loss_trace) <= 1e-12)


def test_zero_network_sits_on_the_boundary():
    model = MlpModel(
        [np.zeros((2, 1)), np.zeros((1, 2))], [np.zeros(2), np.zeros(1)],
        [Activation.SIGMOID, Activation.SIGMOID], FeatureScaler.identity(1),
    )
    assert forward(model, 5.0) == pytest.approx(0.5)
    assert classify(model, 5.0, 0.5) == -1
    assert classify(model, 5.0, 0.4999) == 1


# 门限升高时 -1 不会变成 +1
def test_classify_is_monotone_in_threshold(ring, params, rng):
    data = _ring_data(ring, params, rng, 300)
    model = train_ce(classifier_config(1, [4], learning_rate=0.5, epochs=30, seed=2), data)
    test = _ring_data(ring, params, rng, 500)
    thresholds = np.linspace(-0.1, 1.1, 61)
    decisions = np.array([classify(model, test, lam) for lam in thresholds])
    assert np.all(np.diff(decisions, axis=0) <= 0)
    assert np.all(decisions[0] == 1) and np.all(decisions[-1] == -1)


def _rescaled(data: AttenuationDataset) -> AttenuationDataset:
    """The same vectors with every dB value mapped to 2 x + 5."""
    return AttenuationDataset(data.positions, db_to_linear(2.0 * data.a_db + 5.0), data.labels, data.k_f)


# 标准化后 (x2, +5 dB) 的输入给出相同判决
def test_decisions_invariant_to_affine_db_rescaling(urban, params, rng):
    train = build_dataset(urban, params, None, 300, 1, None, rng)
    test = build_dataset(urban, params, None, 300, 1, None, rng)

    svm, svm_scaled = train_twoclass(train), train_twoclass(_rescaled(train))
    assert svm_scaled.gamma_k == pytest.approx(svm.gamma_k, rel=1e-9)
    assert np.allclose(score(svm_scaled, _rescaled(test)), score(svm, test), atol=1e-8)
    assert np.array_equal(svm_decide(svm_scaled, _rescaled(test), 0.0), svm_decide(svm, test, 0.0))

    config = classifier_config(5, [5], learning_rate=0.5, epochs=40, seed=4)
    net, net_scaled = train_ce(config, train), train_ce(config, _rescaled(train))
    assert np.allclose(forward(net_scaled, _rescaled(test)), forward(net, test), atol=1e-6)
    assert np.array_equal(classify(net_scaled, _rescaled(test), 0.5), classify(net, test, 0.5))


def test_mlp_rejects_wrong_dimensions(urban, params, rng):
    data = build_dataset(urban, params, None, 20, 1, None, rng)
    with pytest.raises(DataException) as exc:
        train_ce(classifier_config(3), data)
    assert exc.value.code_enum is ErrorCodeEnum.DIMENSION_MISMATCH


def test_mlp_round_trip_keeps_scores(ring, params, rng):
    data = _ring_data(ring, params, rng, 100)
    model = train_ce(classifier_config(1, [4], epochs=5), data)
    restored = load_mlp(dump_mlp(model))
    assert np.array_equal(forward(restored, data), forward(model, data))


# 测试自编码器
def _manifold(rng, n):
    t = rng.uniform(40.0, 60.0, n)
    db = np.column_stack([t, 0.5 * t + 20.0, 100.0 - t]) + rng.normal(0.0, 0.2, (n, 3))
    return 10.0 ** (db / 10.0)


def test_autoencoder_flags_vectors_off_the_training_box(rng):
    h0 = _manifold(rng, 500)
    config = autoencoder_config(3, [2, 1, 2], learning_rate=0.5, epochs=100, seed=1)
    model = train_autoencoder(config, h0)
    inside = ae_score(model, _manifold(rng, 200))
    outside = ae_score(model, 10.0 ** (np.tile([[80.0, 10.0, 90.0]], (200, 1)) / 10.0))
    assert np.all(inside >= 0)
    assert np.mean(outside) > 10 * np.mean(inside)
    err = ae_score(model, h0[0])
    assert ae_decide(model, h0[0], err) == 1


def test_autoencoder_rejects_h1_rows_and_wide_codes(rng):
    a = _manifold(rng, 10)
    data = AttenuationDataset(np.zeros((10, 2)), a, np.array([-1] * 9 + [1]))
    with pytest.raises(DataException) as exc:
        train_autoencoder(autoencoder_config(3, [2, 1, 2]), data)
    assert exc.value.code_enum is ErrorCodeEnum.H1_ROWS_PRESENT
    with pytest.raises(ConfigException):
        train_autoencoder(MlpConfig(layer_sizes=[3, 4, 3]), a)


# 测试 LS-SVM
def test_kernel_value_at_bandwidth():
    config = KernelConfig(gamma_k=2.0)
    assert kernel([0.0, 0.0], [2.0, 0.0], config) == pytest.approx(np.exp(-0.5))
    assert kernel([1.0, 1.0], [1.0, 1.0], config) == pytest.approx(1.0)
    with pytest.raises(DataException):
        kernel([0.0], [0.0, 1.0], config)


def test_twoclass_solution_satisfies_optimality(ring, params, rng):
    data = _ring_data(ring, params, rng, 200)
    model = train_twoclass(data, KernelConfig(C=10.0))
    assert model.variant is SvmVariant.TWO_CLASS
    assert model.residual <= 1e-8
    assert abs(np.sum(model.coef)) <= 1e-8 * np.abs(model.coef).sum()
    best = objective(model, labels=data.labels)
    for _ in range(5):
        step = rng.normal(0.0, 1e-3, model.coef.shape)
        assert objective(model, model.coef + step, labels=data.labels) >= best
    assert objective(model, bias=model.bias + 1e-3, labels=data.labels) >= best


def test_twoclass_scores_separate_the_ring(ring, params, rng):
    model = train_twoclass(_ring_data(ring, params, rng, 300))
    test = _ring_data(ring, params, rng, 500)
    s = score(model, test)
    assert rank_auc(s[test.labels == -1], s[test.labels == 1]) > 0.95


# 输入取自有限字母表时 |w|^2 随 S 加倍趋于稳定
def test_weight_norm_levels_off_on_a_finite_alphabet(rng):
    alphabet_db = np.array([40.0, 46.0, 52.0, 58.0])
    alphabet_labels = np.array([-1, -1, 1, 1])
    norms = []
    for s in (200, 400, 800, 1600):
        idx = rng.integers(0, alphabet_db.size, s)
        # 保证每个符号都出现
        idx[:alphabet_db.size] = np.arange(alphabet_db.size)
        data = AttenuationDataset(np.zeros((s, 2)), db_to_linear(alphabet_db[idx]), alphabet_labels[idx])
        norms.append(weight_norm_sq(train_twoclass(data, KernelConfig(gamma_k=0.5, C=10.0))))
    ratios = np.array(norms[1:]) / np.array(norms[:-1])
    assert np.all(np.isfinite(norms))
    assert np.all(np.abs(ratios - 1.0) <= 0.1)


def test_twoclass_needs_both_labels(ring, params, rng):
    data = _ring_data(ring, params, rng, 100).of_label(RegionLabel.H1)
    with pytest.raises(DataException) as exc:
        train_twoclass(data)
    assert exc.value.code_enum is ErrorCodeEnum.EMPTY_CLASS


def test_oneclass_scores_outside_higher(ring, params, rng):
    h0 = build_dataset(ring, params, None, 300, 1, [RegionLabel.H0], rng)
    model = train_oneclass(h0, KernelConfig(C=10.0))
    assert model.residual <= 1e-8
    test = _ring_data(ring, params, rng, 500)
    s = oc_score(model, test)
    assert rank_auc(s[test.labels == -1], s[test.labels == 1]) > 0.9


def test_oneclass_rejects_h1_rows(ring, params, rng):
    data = _ring_data(ring, params, rng, 200)
    with pytest.raises(DataException) as exc:
        train_oneclass(data)
    assert exc.value.code_enum is ErrorCodeEnum.H1_ROWS_PRESENT


def test_svm_round_trip_keeps_scores(ring, params, rng):
    data = _ring_data(ring, params, rng, 80)
    model = train_twoclass(data)
    restored = load_svm(dump_svm(model))
    assert np.array_equal(score(restored, data), score(model, data))
    with pytest.raises(DataException):
        load_svm(dump_svm(model).replace("lssvm", "mlp", 1))
