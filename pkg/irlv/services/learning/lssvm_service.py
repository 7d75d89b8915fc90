# irlv/services/learning/lssvm_service.py
"""
Least-squares SVMs with a Gaussian kernel, trained by one linear solve.

Both variants score t(a) = sum_j c_j k(a_j, a) + b over every training vector.

Two-class, t_i (w^T phi_i + b) = 1 - e_i:
    (K + I/C) c + b 1 = t,  1^T c = 0,  e_i = t_i c_i / C
One-class, -b - w^T phi_i = e_i with b in the objective:
    (K + I/C) alpha = b 1,  1^T alpha = -1,  c = -alpha,  e_i = -alpha_i / C
"""
from dataclasses import dataclass, replace
from typing import Dict, Iterable, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.spatial.distance import cdist, pdist
from scipy.stats import rankdata

from irlv.core.exceptions import ConfigException, DataException, NumericException
from irlv.core.logger import get_logger
from irlv.enums import ErrorCodeEnum, ScalerKind, SvmVariant
from irlv.schemas.learning import KernelConfig
from irlv.services.channel import AttenuationDataset
from irlv.services.learning.model_io import dump_model_text, parse_model_text, require
from irlv.services.learning.preprocessing import FeatureScaler, Features, feature_matrix, is_single
from irlv.utils.linalg_utils import jittered_cho_factor

logger = get_logger(__name__)


@dataclass(frozen=True)
class SvmModel:
    variant: SvmVariant
    support: np.ndarray  # 缩放后的训练向量 (S, d)
    coef: np.ndarray
    bias: float
    gamma_k: float
    C: float
    scaler: FeatureScaler
    errors: np.ndarray
    residual: float = 0.0
    ridge: float = 0.0
    # 单类: 异常得分 = orientation * t(a)
    orientation: float = -1.0

    def __post_init__(self):
        if self.coef.shape != (self.support.shape[0],):
            raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, "one coefficient per support vector expected")
        if not (np.all(np.isfinite(self.coef)) and np.isfinite(self.bias)):
            raise DataException(ErrorCodeEnum.NON_FINITE, "SVM coefficients must be finite")

    @property
    def n_features(self) -> int:
        return self.support.shape[1]


# --- 核函数 ---
def kernel_matrix(x: np.ndarray, y: np.ndarray, gamma_k: float) -> np.ndarray:
    return np.exp(-cdist(x, y, "sqeuclidean") / (2.0 * gamma_k ** 2))


def kernel(x, y, config: KernelConfig) -> float:
    """exp(-|x - y|^2 / (2 gamma_k^2))."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if x.shape != y.shape:
        raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"kernel arguments differ: {x.shape} vs {y.shape}")
    if config.gamma_k is None:
        raise ConfigException("kernel evaluation needs an explicit gamma_k")
    return float(np.exp(-np.sum((x - y) ** 2) / (2.0 * config.gamma_k ** 2)))


def median_bandwidth(x: np.ndarray, max_points: int = 2000, seed: int = 0) -> float:
    """Median pairwise distance of (a subsample of) the scaled training vectors."""
    if x.shape[0] > max_points:
        x = x[np.random.default_rng(seed).choice(x.shape[0], size=max_points, replace=False)]
    if x.shape[0] < 2:
        return 1.0
    med = float(np.median(pdist(x)))
    return med if med > 0 else 1.0


# --- 线性系统 ---
def _factor(h: np.ndarray, ridge: float):
    try:
        return cho_factor(h, lower=True, check_finite=False), 0.0
    except LinAlgError:
        base = ridge * np.trace(h) / h.shape[0]
        logger.warning(f"⚠️ LS-SVM system not positive definite, retrying with ridge {base:.3e}")
        try:
            return jittered_cho_factor(h, base)
        except LinAlgError as e:
            raise NumericException(
                ErrorCodeEnum.SINGULAR_SYSTEM, message=f"LS-SVM system of size {h.shape[0]} stays singular",
            ) from e


def _prepare(x_lin: np.ndarray, config: KernelConfig, kind: ScalerKind = ScalerKind.ZSCORE):
    x_lin = feature_matrix(x_lin)
    if x_lin.shape[0] > config.max_train:
        keep = np.sort(np.random.default_rng(config.seed).choice(x_lin.shape[0], config.max_train, replace=False))
        logger.info(
            f"📉 LS-SVM training set subsampled from {x_lin.shape[0]} to {config.max_train} vectors (O(S^3) solve)"
        )
    else:
        keep = np.arange(x_lin.shape[0])
    scaler = FeatureScaler.fit(x_lin[keep], kind)
    x = scaler.transform(x_lin[keep])
    gamma_k = config.gamma_k or median_bandwidth(x, config.median_sample, config.seed)
    return keep, scaler, x, gamma_k


def train_twoclass(data: AttenuationDataset, config: Optional[KernelConfig] = None) -> SvmModel:
    config = config or KernelConfig()
    counts = data.counts()
    if counts["h0"] == 0 or counts["h1"] == 0:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, f"two-class training needs both labels, got {counts}")
    keep, scaler, x, gamma_k = _prepare(data.a, config)
    t = data.labels[keep].astype(float)
    if np.all(t == t[0]):
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, "subsampling left a single class")

    h = kernel_matrix(x, x, gamma_k) + np.eye(len(t)) / config.C
    factor, jitter = _factor(h, config.ridge)
    eta = cho_solve(factor, np.ones(len(t)))
    nu = cho_solve(factor, t)
    b = float(np.sum(nu) / np.sum(eta))
    c = nu - b * eta

    residual = np.concatenate([h @ c + b - t, [np.sum(c)]])
    rel = float(np.linalg.norm(residual) / np.linalg.norm(t))
    logger.debug(f"two-class LS-SVM: S={len(t)}, gamma_k={gamma_k:.4g}, C={config.C}, residual {rel:.2e}")
    return SvmModel(
        SvmVariant.TWO_CLASS, x, c, b, gamma_k, config.C, scaler,
        errors=t * c / config.C, residual=rel, ridge=jitter, orientation=1.0,
    )


def _h0_vectors(data_h0) -> np.ndarray:
    if isinstance(data_h0, AttenuationDataset):
        if np.any(data_h0.labels == 1):
            raise DataException(ErrorCodeEnum.H1_ROWS_PRESENT, "one-class training takes H0 rows only")
        return data_h0.a
    return feature_matrix(data_h0)


def train_oneclass(data_h0, config: Optional[KernelConfig] = None) -> SvmModel:
    config = config or KernelConfig()
    a = _h0_vectors(data_h0)
    if a.shape[0] == 0:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, "no H0 vectors to train on")
    _, scaler, x, gamma_k = _prepare(a, config)
    s = x.shape[0]

    h = kernel_matrix(x, x, gamma_k) + np.eye(s) / config.C
    factor, jitter = _factor(h, config.ridge)
    eta = cho_solve(factor, np.ones(s))
    b = float(-1.0 / np.sum(eta))
    alpha = b * eta

    residual = np.concatenate([h @ alpha - b, [np.sum(alpha) + 1.0]])
    rel = float(np.linalg.norm(residual) / max(1.0, abs(b) * np.sqrt(s)))
    model = SvmModel(
        SvmVariant.ONE_CLASS, x, -alpha, b, gamma_k, config.C, scaler,
        errors=-alpha / config.C, residual=rel, ridge=jitter,
    )
    orientation = _calibrate_orientation(model, config.seed)
    logger.debug(f"one-class LS-SVM: S={s}, gamma_k={gamma_k:.4g}, b={b:.4g}, orientation {orientation:+.0f}")
    return replace(model, orientation=orientation)


def _calibrate_orientation(model: SvmModel, seed: int, n_samples: int = 2000) -> float:
    """
    Sign that makes the anomaly score larger on a uniform sample of the
    training bounding box than on the training vectors.
    """
    rng = np.random.default_rng(seed)
    lo, hi = model.support.min(axis=0), model.support.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    box_points = rng.uniform(lo - 0.5 * span, hi + 0.5 * span, size=(n_samples, model.n_features))
    inside = np.mean(_soft_output(model, model.support))
    outside = np.mean(_soft_output(model, box_points))
    return 1.0 if outside > inside else -1.0


# --- 打分 ---
def _soft_output(model: SvmModel, x: np.ndarray) -> np.ndarray:
    return kernel_matrix(x, model.support, model.gamma_k) @ model.coef + model.bias


def score(model: SvmModel, a: Features):
    """t(a) = sum_i c_i k(a_i, a) + b."""
    x = model.scaler.transform(feature_matrix(a, model.n_features))
    values = _soft_output(model, x)
    return float(values[0]) if is_single(a, model.n_features) else values


def svm_decide(model: SvmModel, a: Features, Lambda: float):
    """+1 iff t(a) > lambda."""
    values = score(model, a)
    decisions = np.where(np.asarray(values) > Lambda, 1, -1)
    return int(decisions) if np.ndim(values) == 0 else decisions


def oc_score(model: SvmModel, a: Features):
    """One-class anomaly score: larger means farther from the H0 training data."""
    return model.orientation * score(model, a)


def oc_decide(model: SvmModel, a: Features, threshold: float):
    """-1 (inside the ROI) iff the anomaly score is below the threshold."""
    values = oc_score(model, a)
    decisions = np.where(np.asarray(values) < threshold, -1, 1)
    return int(decisions) if np.ndim(values) == 0 else decisions


# --- 目标函数 (最优性检查) ---
def objective(model: SvmModel, coef: Optional[np.ndarray] = None, bias: Optional[float] = None,
              labels: Optional[np.ndarray] = None) -> float:
    """
    Primal objective at w = sum_j coef_j phi(a_j) on the training vectors.

    Two-class: 1/2 w^T w + C/2 sum (1 - t_i (w^T phi_i + b))^2, needs ``labels``.
    One-class: 1/2 w^T w + C/2 sum (-b - w^T phi_i)^2 + b.
    """
    coef = model.coef if coef is None else np.asarray(coef, dtype=float)
    bias = model.bias if bias is None else float(bias)
    k = kernel_matrix(model.support, model.support, model.gamma_k)
    kc = k @ coef
    ww = float(coef @ kc)
    if model.variant is SvmVariant.TWO_CLASS:
        if labels is None:
            raise ConfigException("the two-class objective needs the training labels")
        e = 1.0 - np.asarray(labels, dtype=float) * (kc + bias)
        return 0.5 * ww + 0.5 * model.C * float(np.sum(e ** 2))
    e = -bias - kc
    return 0.5 * ww + 0.5 * model.C * float(np.sum(e ** 2)) + bias


def weight_norm_sq(model: SvmModel) -> float:
    """|w|^2 = sum_i sum_j c_i c_j k(a_i, a_j)."""
    return float(model.coef @ kernel_matrix(model.support, model.support, model.gamma_k) @ model.coef)


# --- 超参数搜索 ---
def rank_auc(scores_h0: np.ndarray, scores_h1: np.ndarray) -> float:
    """P(score_H1 > score_H0) with ties counted half."""
    n0, n1 = len(scores_h0), len(scores_h1)
    ranks = rankdata(np.concatenate([scores_h0, scores_h1]))
    return float((np.sum(ranks[n0:]) - n1 * (n1 + 1) / 2.0) / (n0 * n1))


def grid_search(
    train: AttenuationDataset,
    validation: AttenuationDataset,
    C_grid: Iterable[float] = (1.0, 10.0, 100.0),
    gamma_scales: Iterable[float] = (0.5, 1.0, 2.0),
    base: Optional[KernelConfig] = None,
) -> Tuple[KernelConfig, float]:
    """Two-class (C, gamma_k) maximizing validation AUC; gamma_k scales the median heuristic."""
    base = base or KernelConfig()
    val_h0, val_h1 = validation.of_label(-1), validation.of_label(1)
    if len(val_h0) == 0 or len(val_h1) == 0:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, "grid search needs both labels in the validation split")
    _, _, x, median = _prepare(train.a, base.model_copy(update={"gamma_k": None}))
    best, best_auc = None, -np.inf
    for C in C_grid:
        for scale in gamma_scales:
            cfg = base.model_copy(update={"C": C, "gamma_k": scale * median})
            model = train_twoclass(train, cfg)
            value = rank_auc(score(model, val_h0), score(model, val_h1))
            logger.debug(f"grid search C={C:g} gamma_k={cfg.gamma_k:.4g}: AUC {value:.4f}")
            if value > best_auc:
                best, best_auc = cfg, value
    logger.info(f"🔎 grid search picked C={best.C:g}, gamma_k={best.gamma_k:.4g} (AUC {best_auc:.4f})")
    return best, best_auc


# --- 保存 / 加载 ---
def dump_svm(model: SvmModel, extra_meta: Optional[Dict[str, object]] = None) -> str:
    meta = {
        **(extra_meta or {}),
        "kind": "lssvm",
        "variant": model.variant.value,
        "bias": f"{model.bias:.17g}",
        "gamma_k": f"{model.gamma_k:.17g}",
        "C": f"{model.C:.17g}",
        "orientation": f"{model.orientation:.17g}",
        "residual": f"{model.residual:.17g}",
        "ridge": f"{model.ridge:.17g}",
        "scaler": model.scaler.kind.value,
    }
    arrays = {
        "scaler_shift": model.scaler.shift,
        "scaler_scale": model.scaler.scale,
        "support": model.support,
        "coef": model.coef,
        "errors": model.errors,
    }
    return dump_model_text(meta, arrays)


def load_svm(text: str) -> SvmModel:
    meta, arrays = parse_model_text(text)
    require(
        meta, arrays,
        keys=("kind", "variant", "bias", "gamma_k", "C", "orientation", "scaler"),
        names=("scaler_shift", "scaler_scale", "support", "coef", "errors"),
    )
    if meta["kind"] != "lssvm":
        raise DataException(ErrorCodeEnum.BAD_MODEL_FILE, f"expected an lssvm model, found {meta['kind']}")
    try:
        variant = SvmVariant(meta["variant"])
        scaler = FeatureScaler(
            ScalerKind(meta["scaler"]), np.atleast_1d(arrays["scaler_shift"]), np.atleast_1d(arrays["scaler_scale"]),
        )
        return SvmModel(
            variant,
            np.atleast_2d(arrays["support"]),
            np.atleast_1d(arrays["coef"]),
            float(meta["bias"]),
            float(meta["gamma_k"]),
            float(meta["C"]),
            scaler,
            errors=np.atleast_1d(arrays["errors"]),
            residual=float(meta.get("residual", "0")),
            ridge=float(meta.get("ridge", "0")),
            orientation=float(meta["orientation"]),
        )
    except ValueError as e:
        raise DataException(ErrorCodeEnum.BAD_MODEL_FILE, str(e)) from e
