from .lssvm_service import (
    SvmModel,
    dump_svm,
    grid_search,
    kernel,
    kernel_matrix,
    load_svm,
    median_bandwidth,
    objective,
    oc_decide,
    oc_score,
    rank_auc,
    score,
    svm_decide,
    train_oneclass,
    train_twoclass,
    weight_norm_sq,
)
from .mlp_service import (
    MlpModel,
    ae_decide,
    ae_score,
    classify,
    dump_mlp,
    forward,
    forward_features,
    glorot_init,
    load_mlp,
    loss_and_gradients,
    train_autoencoder,
    train_ce,
    train_mse,
)
from .model_io import dump_model_text, parse_model_text
from .preprocessing import FeatureScaler, feature_matrix

__all__ = [
    "FeatureScaler",
    "MlpModel",
    "SvmModel",
    "ae_decide",
    "ae_score",
    "classify",
    "dump_mlp",
    "dump_model_text",
    "dump_svm",
    "feature_matrix",
    "forward",
    "forward_features",
    "glorot_init",
    "grid_search",
    "kernel",
    "kernel_matrix",
    "load_mlp",
    "load_svm",
    "loss_and_gradients",
    "median_bandwidth",
    "objective",
    "oc_decide",
    "oc_score",
    "parse_model_text",
    "rank_auc",
    "score",
    "svm_decide",
    "train_autoencoder",
    "train_ce",
    "train_mse",
    "train_oneclass",
    "train_twoclass",
    "weight_norm_sq",
]
