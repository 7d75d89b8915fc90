# irlv/services/learning/mlp_service.py
"""
Feedforward networks trained by backpropagation and mini-batch SGD.

Layer l maps y -> psi(y W_l^T + b_l), W_l of shape (n_out, n_in). The forward
pass keeps every pre-activation and activation; the backward pass walks the
same list in reverse: dW = dz^T y, db = sum(dz), dy = dz W, dz = psi'(z) dy.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from irlv.core.exceptions import ConfigException, DataException, TrainingDivergedException
from irlv.core.logger import get_logger
from irlv.enums import Activation, ErrorCodeEnum, LossKind, ScalerKind
from irlv.schemas.learning import MlpConfig
from irlv.services.channel import AttenuationDataset
from irlv.services.learning.model_io import dump_model_text, parse_model_text, require
from irlv.services.learning.preprocessing import FeatureScaler, Features, feature_matrix, is_single

logger = get_logger(__name__)


@dataclass(frozen=True)
class MlpModel:
    weights: List[np.ndarray]
    biases: List[np.ndarray]
    activations: List[Activation]
    scaler: FeatureScaler
    loss: LossKind = LossKind.CE
    loss_trace: List[float] = field(default_factory=list)

    def __post_init__(self):
        if len(self.weights) != len(self.biases) or len(self.weights) != len(self.activations):
            raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, "weights, biases and activations disagree")
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if b.shape != (w.shape[0],):
                raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"bias {l} does not match weight rows")
            if l and w.shape[1] != self.weights[l - 1].shape[0]:
                raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"layer {l} input width mismatch")
        if not all(np.all(np.isfinite(p)) for p in (*self.weights, *self.biases)):
            raise DataException(ErrorCodeEnum.NON_FINITE, "network parameters must be finite")

    @property
    def layer_sizes(self) -> List[int]:
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    @property
    def n_inputs(self) -> int:
        return self.weights[0].shape[1]


# --- 激活函数 ---
def _activate(kind: Activation, z: np.ndarray) -> np.ndarray:
    return expit(z) if kind is Activation.SIGMOID else z


def _activation_slope(kind: Activation, y: np.ndarray) -> np.ndarray:
    # sigmoid 导数用输出表示: y (1 - y)
    return y * (1.0 - y) if kind is Activation.SIGMOID else np.ones_like(y)


def _propagate(weights, biases, activations, x: np.ndarray):
    """Forward pass keeping (z, y) per layer; ``ys[0]`` is the input."""
    ys, zs = [x], []
    for w, b, act in zip(weights, biases, activations):
        z = ys[-1] @ w.T + b
        zs.append(z)
        ys.append(_activate(act, z))
    return zs, ys


def forward_features(model: MlpModel, x: np.ndarray) -> np.ndarray:
    """Network output for already-scaled inputs, shape (n, N_out)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != model.n_inputs:
        raise DataException(
            ErrorCodeEnum.DIMENSION_MISMATCH, f"network expects {model.n_inputs} inputs, got {x.shape[1]}",
        )
    _, ys = _propagate(model.weights, model.biases, model.activations, x)
    return ys[-1]


def forward(model: MlpModel, a: Features):
    """
    Soft score t(a) of a classifier (scalar for one vector, (n,) for many), or
    the reconstruction y^(Q) of an autoencoder.
    """
    x = model.scaler.transform(feature_matrix(a, model.n_inputs))
    out = forward_features(model, x)
    single = is_single(a, model.n_inputs)
    if out.shape[1] == 1:
        return float(out[0, 0]) if single else out[:, 0]
    return out[0] if single else out


# --- 损失与梯度 ---
def _loss_value(loss: LossKind, z_out: np.ndarray, y_out: np.ndarray, targets: np.ndarray) -> float:
    if loss is LossKind.CE:
        # softplus(z) - t z 等价于交叉熵, 且数值稳定
        return float(np.mean(np.sum(np.logaddexp(0.0, z_out) - targets * z_out, axis=1)))
    return float(np.mean(np.mean((y_out - targets) ** 2, axis=1)))


def loss_and_gradients(
    weights: Sequence[np.ndarray],
    biases: Sequence[np.ndarray],
    activations: Sequence[Activation],
    x: np.ndarray,
    targets: np.ndarray,
    loss: LossKind,
) -> Tuple[float, List[np.ndarray], List[np.ndarray]]:
    """
    Mean loss over the batch and its gradients.

    CE: -[t ln y + (1 - t) ln(1 - y)] with a sigmoid output.
    MSE / reconstruction: (1 / N_out) sum (y - t)^2.
    """
    targets = np.asarray(targets, dtype=float).reshape(x.shape[0], -1)
    zs, ys = _propagate(weights, biases, activations, x)
    n, n_out = targets.shape
    value = _loss_value(loss, zs[-1], ys[-1], targets)

    if loss is LossKind.CE:
        if activations[-1] is not Activation.SIGMOID:
            raise ConfigException("cross-entropy needs a sigmoid output layer")
        dz = (ys[-1] - targets) / n
    else:
        dz = 2.0 * (ys[-1] - targets) / (n * n_out) * _activation_slope(activations[-1], ys[-1])

    grad_w: List[np.ndarray] = [None] * len(weights)
    grad_b: List[np.ndarray] = [None] * len(weights)
    for l in range(len(weights) - 1, -1, -1):
        grad_w[l] = dz.T @ ys[l]
        grad_b[l] = dz.sum(axis=0)
        if l:
            dz = (dz @ weights[l]) * _activation_slope(activations[l - 1], ys[l])
    return value, grad_w, grad_b


def glorot_init(layer_sizes: Sequence[int], rng: np.random.Generator):
    weights, biases = [], []
    for n_in, n_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        limit = np.sqrt(6.0 / (n_in + n_out))
        weights.append(rng.uniform(-limit, limit, size=(n_out, n_in)))
        biases.append(np.zeros(n_out))
    return weights, biases


def _sgd(config: MlpConfig, x: np.ndarray, targets: np.ndarray, loss: LossKind):
    """Shuffled mini-batch SGD; the trace holds the full-data loss before training and after every epoch."""
    rng = np.random.default_rng(config.seed)
    activations = config.activation_schedule()
    weights, biases = glorot_init(config.layer_sizes, rng)
    n = x.shape[0]
    batch = n if config.batch_size is None else min(config.batch_size, n)

    def full_loss() -> float:
        zs, ys = _propagate(weights, biases, activations, x)
        return _loss_value(loss, zs[-1], ys[-1], targets)

    trace = [full_loss()]
    for epoch in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, batch):
            idx = order[start:start + batch]
            _, gw, gb = loss_and_gradients(weights, biases, activations, x[idx], targets[idx], loss)
            for l in range(len(weights)):
                weights[l] -= config.learning_rate * gw[l]
                biases[l] -= config.learning_rate * gb[l]
        trace.append(full_loss())
        if not np.isfinite(trace[-1]):
            logger.error(f"❌ {loss.value} loss diverged at epoch {epoch + 1}")
            raise TrainingDivergedException(trace)
    if trace[-1] > trace[0]:
        logger.warning(f"⚠️ final {loss.value} loss {trace[-1]:.4g} above initial {trace[0]:.4g}, consider a smaller learning rate")
    logger.debug(f"{loss.value} training: {config.epochs} epochs, loss {trace[0]:.4g} -> {trace[-1]:.4g}")
    return weights, biases, activations, trace


def _labeled(data: AttenuationDataset, config: MlpConfig):
    if len(data) == 0:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, "training set is empty")
    if config.n_inputs != data.n_aps or config.n_outputs != 1:
        raise DataException(
            ErrorCodeEnum.DIMENSION_MISMATCH,
            f"network {config.layer_sizes} does not fit {data.n_aps} features and one score",
        )
    # 标签 {-1, +1} -> 目标 {0, 1}
    return (data.labels[:, None] + 1.0) / 2.0


def _train_classifier(config: MlpConfig, data: AttenuationDataset, loss: LossKind) -> MlpModel:
    targets = _labeled(data, config)
    scaler = FeatureScaler.fit(data, ScalerKind.ZSCORE)
    weights, biases, activations, trace = _sgd(config, scaler.transform(data), targets, loss)
    return MlpModel(weights, biases, activations, scaler, loss, trace)


def train_mse(config: MlpConfig, data: AttenuationDataset) -> MlpModel:
    return _train_classifier(config, data, LossKind.MSE)


def train_ce(config: MlpConfig, data: AttenuationDataset) -> MlpModel:
    return _train_classifier(config, data, LossKind.CE)


def classify(model: MlpModel, a: Features, Lambda: float):
    """+1 iff t(a) > lambda."""
    scores = forward(model, a)
    decisions = np.where(np.asarray(scores) > Lambda, 1, -1)
    return int(decisions) if np.ndim(scores) == 0 else decisions


# --- 自编码器 ---
def train_autoencoder(config: MlpConfig, data_h0) -> MlpModel:
    """Reconstruction training on H0 vectors; inputs are min-max scaled dB."""
    if isinstance(data_h0, AttenuationDataset):
        if np.any(data_h0.labels == 1):
            raise DataException(ErrorCodeEnum.H1_ROWS_PRESENT, "autoencoder training takes H0 rows only")
        a = data_h0.a
    else:
        a = feature_matrix(data_h0, config.n_inputs)
    if a.shape[0] == 0:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, "no H0 vectors to train on")
    if config.n_inputs != a.shape[1] or config.n_outputs != a.shape[1]:
        raise DataException(
            ErrorCodeEnum.DIMENSION_MISMATCH, f"autoencoder {config.layer_sizes} does not fit {a.shape[1]} features",
        )
    if min(config.layer_sizes[1:-1], default=config.n_inputs) >= config.n_inputs:
        raise ConfigException(f"autoencoder code must be narrower than its {config.n_inputs} inputs")
    scaler = FeatureScaler.fit(a, ScalerKind.MINMAX)
    x = scaler.transform(a)
    weights, biases, activations, trace = _sgd(config, x, x, LossKind.RECONSTRUCTION)
    return MlpModel(weights, biases, activations, scaler, LossKind.RECONSTRUCTION, trace)


def ae_score(model: MlpModel, a: Features):
    """Reconstruction error (1/N) sum |x_n - y_n|^2 in the scaled input space."""
    x = model.scaler.transform(feature_matrix(a, model.n_inputs))
    y = forward_features(model, x)
    err = np.mean((x - y) ** 2, axis=1)
    single = is_single(a, model.n_inputs)
    return float(err[0]) if single else err


def ae_decide(model: MlpModel, a: Features, Lambda: float):
    """+1 iff the reconstruction error is >= lambda."""
    err = ae_score(model, a)
    decisions = np.where(np.asarray(err) >= Lambda, 1, -1)
    return int(decisions) if np.ndim(err) == 0 else decisions


# --- 保存 / 加载 ---
def dump_mlp(model: MlpModel, extra_meta: Optional[Dict[str, object]] = None) -> str:
    meta = {
        **(extra_meta or {}),
        "kind": "mlp",
        "loss": model.loss.value,
        "layers": model.layer_sizes,
        "activations": [a.value for a in model.activations],
        "scaler": model.scaler.kind.value,
        "scaler_in_db": int(model.scaler.in_db),
    }
    arrays = {"scaler_shift": model.scaler.shift, "scaler_scale": model.scaler.scale}
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        arrays[f"W{l}"] = w
        arrays[f"b{l}"] = b
    arrays["loss_trace"] = np.asarray(model.loss_trace, dtype=float)
    return dump_model_text(meta, arrays)


def load_mlp(text: str) -> MlpModel:
    meta, arrays = parse_model_text(text)
    require(meta, arrays, keys=("kind", "loss", "layers", "activations", "scaler"),
            names=("scaler_shift", "scaler_scale"))
    if meta["kind"] != "mlp":
        raise DataException(ErrorCodeEnum.BAD_MODEL_FILE, f"expected an mlp model, found {meta['kind']}")
    sizes = [int(v) for v in meta["layers"].split()]
    n_layers = len(sizes) - 1
    require(meta, arrays, names=[f"W{l}" for l in range(n_layers)] + [f"b{l}" for l in range(n_layers)])
    try:
        activations = [Activation(v) for v in meta["activations"].split()]
        loss = LossKind(meta["loss"])
        scaler_kind = ScalerKind(meta["scaler"])
    except ValueError as e:
        raise DataException(ErrorCodeEnum.BAD_MODEL_FILE, str(e)) from e
    scaler = FeatureScaler(
        scaler_kind,
        np.atleast_1d(arrays["scaler_shift"]),
        np.atleast_1d(arrays["scaler_scale"]),
        in_db=bool(int(meta.get("scaler_in_db", "1"))),
    )
    weights = [np.asarray(arrays[f"W{l}"]).reshape(sizes[l + 1], sizes[l]) for l in range(n_layers)]
    biases = [np.atleast_1d(arrays[f"b{l}"]) for l in range(n_layers)]
    trace = arrays.get("loss_trace", np.zeros(0)).reshape(-1).tolist()
    return MlpModel(weights, biases, activations, scaler, loss, trace)

