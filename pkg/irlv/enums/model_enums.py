from enum import Enum


class ModelKind(str, Enum):
    """
    运行配置中 model.kind 的取值。
    继承 (str, Enum) 让 YAML 中的字符串直接校验为枚举成员。
    """
    NP = "np"
    NP_QUANTIZED = "np-quantized"
    MLP_CE = "mlp-ce"
    MLP_MSE = "mlp-mse"
    LSSVM = "lssvm"
    OCLSSVM = "oclssvm"
    AUTOENCODER = "autoencoder"
    GLRT = "glrt"
    EDA = "eda"

    @property
    def one_class(self) -> bool:
        return self in (ModelKind.OCLSSVM, ModelKind.AUTOENCODER, ModelKind.GLRT)


class LlrVariant(str, Enum):
    FADING_NU2 = "fading-nu2"
    FADING_NU3 = "fading-nu3"
    FADING = "fading"
    SHADOWING_UNCORR = "shadowing-uncorr"
    NUMERIC_ORACLE = "numeric-oracle"
    QUANTIZED_HISTOGRAM = "quantized-histogram"


class ShadowingKind(str, Enum):
    NONE = "none"
    UNCORRELATED = "uncorrelated"
    POINTS = "points"
    GRID = "grid"


class ShadowingAcrossAps(str, Enum):
    INDEPENDENT = "independent"
    SHARED = "shared"


class SvmVariant(str, Enum):
    TWO_CLASS = "two-class"
    ONE_CLASS = "one-class"


class LossKind(str, Enum):
    CE = "ce"
    MSE = "mse"
    RECONSTRUCTION = "reconstruction"


class Activation(str, Enum):
    SIGMOID = "sigmoid"
    LINEAR = "linear"


class ScalerKind(str, Enum):
    # 分类器用 z-score, 自编码器用 [0, 1] 归一化
    ZSCORE = "zscore"
    MINMAX = "minmax"
    IDENTITY = "identity"
