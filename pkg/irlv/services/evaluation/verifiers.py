# irlv/services/evaluation/verifiers.py
"""
One verifier per ``model.kind`` of the run configuration.

Every verifier reports a score oriented like the ROC module expects (larger
favours H1) and decides +1 iff score > threshold, so calibration, sweeps and
serialization are shared. Subclasses register themselves by ``kind``.
"""
from abc import ABC, abstractmethod
from typing import ClassVar, Dict, Optional, Tuple, Type

import numpy as np
from pydantic import ValidationError

from irlv.core.exceptions import ConfigException, DataException
from irlv.core.logger import get_logger
from irlv.enums import ErrorCodeEnum, LlrVariant, ModelKind, RegionLabel, ShadowingKind
from irlv.schemas.channel import ChannelParams
from irlv.schemas.eda import EdaModel
from irlv.schemas.learning import autoencoder_config, classifier_config
from irlv.schemas.nptest import LlrModel
from irlv.schemas.run import Experiment
from irlv.services.channel import AttenuationDataset
from irlv.services.channel.path_loss import db_to_linear
from irlv.services.eda import eda_scores
from irlv.services.evaluation.roc import calibrate_threshold
from irlv.services.geometry import RingScenario
from irlv.services.learning import (
    ae_score,
    dump_mlp,
    dump_model_text,
    dump_svm,
    forward,
    grid_search,
    load_mlp,
    load_svm,
    oc_score,
    parse_model_text,
    score,
    train_autoencoder,
    train_ce,
    train_mse,
    train_oneclass,
    train_twoclass,
)
from irlv.services.nptest import KdeDensity, QuantizedPdfPair, fit_quantized_pdfs, llr_function, ring_log_density
from irlv.services.nptest.llr import closed_form_variant

# 无穷大分数截断到有限值, 保证 ROC 阈值可写入 CSV
SCORE_LIMIT = 1e300

Arrays = Dict[str, np.ndarray]


def channel_params(experiment: Experiment) -> ChannelParams:
    """The propagation part of the channel section."""
    section = experiment.channel
    return ChannelParams(**section.model_dump(include=set(ChannelParams.model_fields)))


def ring_model(experiment: Experiment, variant=None) -> Optional[LlrModel]:
    """
    Closed-form ring likelihoods when the run matches their assumptions
    (ring scenario, one draw per vector, either fading or uncorrelated shadowing).
    """
    scenario, channel = experiment.scenario, experiment.channel
    if not isinstance(scenario, RingScenario) or channel.k_f != 1:
        return None
    if channel.fading:
        if channel.sigma_s_db > 0:
            return None
    elif channel.sigma_s_db <= 0 or channel.shadowing is not ShadowingKind.UNCORRELATED:
        return None
    base = LlrModel.from_ring(scenario, channel, LlrVariant.NUMERIC_ORACLE, fading=channel.fading)
    try:
        return LlrModel.model_validate({**base.model_dump(), "variant": variant or closed_form_variant(base)})
    except ValidationError as e:
        raise ConfigException(f"LLR variant {variant} does not fit the channel: {e.errors()[0]['msg']}") from e


class Verifier(ABC):
    """
    Train on labelled vectors, score, calibrate a threshold, serialize.

    One-class kinds (autoencoder, oclssvm, glrt) refuse H1 rows in ``fit``.
    """
    registry: ClassVar[Dict[ModelKind, Type["Verifier"]]] = {}
    kind: ClassVar[Optional[ModelKind]] = None

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if cls.kind is not None:
            Verifier.registry[cls.kind] = cls

    def __init__(self, experiment: Experiment, seed: int = 0):
        self.experiment = experiment
        self.seed = seed
        self.threshold: Optional[float] = None
        self.fitted = False
        self.logger = get_logger(self.__class__.__name__)

    @property
    def section(self):
        return self.experiment.model

    @property
    def n_aps(self) -> int:
        return self.experiment.scenario.n_aps

    def _check_dims(self, data: AttenuationDataset) -> None:
        if data.n_aps != self.n_aps:
            raise DataException(
                ErrorCodeEnum.DIMENSION_MISMATCH, f"dataset has {data.n_aps} APs, the scenario {self.n_aps}",
            )

    # --- 训练 ---
    def fit(self, train: AttenuationDataset, validation: Optional[AttenuationDataset] = None) -> dict:
        self._check_dims(train)
        if self.kind.one_class and np.any(train.labels == 1):
            raise DataException(
                ErrorCodeEnum.H1_ROWS_PRESENT,
                f"{self.kind.value} trains on H0 rows only; drop the H1 rows explicitly",
                extra={"h1_rows": int(np.sum(train.labels == 1))},
            )
        report = self._fit(train, validation)
        self.fitted = True
        return {"kind": self.kind.value, "n_train": len(train), **report}

    @abstractmethod
    def _fit(self, train: AttenuationDataset, validation: Optional[AttenuationDataset]) -> dict:
        ...

    # --- 打分与判决 ---
    @abstractmethod
    def _scores(self, data: AttenuationDataset) -> np.ndarray:
        ...

    def score(self, data: AttenuationDataset) -> np.ndarray:
        if not self.fitted:
            raise ConfigException(f"{self.kind.value} verifier used before fit or load")
        self._check_dims(data)
        values = np.asarray(self._scores(data), dtype=float).reshape(-1)
        if np.any(np.isnan(values)):
            raise DataException(ErrorCodeEnum.NON_FINITE, f"{self.kind.value} produced NaN scores")
        return np.clip(values, -SCORE_LIMIT, SCORE_LIMIT)

    def calibrate(self, data_h0: AttenuationDataset, target_fa: float) -> float:
        self.threshold = calibrate_threshold(self.score(data_h0), target_fa)
        return self.threshold

    def decide(self, data: AttenuationDataset, threshold: Optional[float] = None) -> np.ndarray:
        """+1 (outside the ROI) iff score > threshold."""
        threshold = self.threshold if threshold is None else threshold
        if threshold is None:
            raise ConfigException("no threshold: calibrate the verifier or pass one")
        return np.where(self.score(data) > threshold, 1, -1)

    # --- 保存 / 加载 ---
    def _tag(self) -> dict:
        threshold = "none" if self.threshold is None else f"{self.threshold:.17g}"
        return {"verifier": self.kind.value, "threshold": threshold, "seed": self.seed}

    def dump(self) -> str:
        meta, arrays = self._state()
        return dump_model_text({**self._tag(), **meta}, arrays)

    def _state(self) -> Tuple[dict, Arrays]:
        return {}, {}

    @abstractmethod
    def _restore(self, text: str, meta: Dict[str, str], arrays: Arrays) -> None:
        ...


class VerifierFactory:
    """Builds verifiers by model kind, fresh or from a saved model file."""

    @staticmethod
    def verifier_class(kind: ModelKind) -> Type[Verifier]:
        cls = Verifier.registry.get(ModelKind(kind))
        if cls is None:
            raise ConfigException(f"no verifier registered for model kind '{kind}'")
        return cls

    @classmethod
    def create(cls, experiment: Experiment, seed: int = 0) -> Verifier:
        return cls.verifier_class(experiment.model.kind)(experiment, seed)

    @classmethod
    def load(cls, experiment: Experiment, text: str) -> Verifier:
        meta, arrays = parse_model_text(text)
        stored = meta.get("verifier")
        if stored is None:
            raise DataException(ErrorCodeEnum.BAD_MODEL_FILE, "model file carries no verifier tag")
        if stored != experiment.model.kind.value:
            raise DataException(
                ErrorCodeEnum.BAD_MODEL_FILE,
                f"model file holds a '{stored}' verifier, the configuration asks for '{experiment.model.kind.value}'",
            )
        verifier = cls.create(experiment, int(meta.get("seed", "0")))
        verifier._restore(text, meta, arrays)
        threshold = meta.get("threshold", "none")
        verifier.threshold = None if threshold == "none" else float(threshold)
        verifier.fitted = True
        return verifier


# ==========================
# 似然比检验
# ==========================
class NpVerifier(Verifier):
    """Closed-form Neyman-Pearson test of the ring; score -M(a)."""
    kind = ModelKind.NP

    def _build(self, variant=None) -> LlrModel:
        model = ring_model(self.experiment, variant)
        if model is None:
            raise ConfigException("the closed-form NP test needs the single-draw ring channel")
        return model

    def _fit(self, train, validation) -> dict:
        self.model = self._build(self.section.np.variant)
        self._llr = llr_function(self.model)
        return {"variant": self.model.variant.value}

    def _scores(self, data):
        return -np.asarray(self._llr(data.a[:, 0]), dtype=float)

    def _state(self):
        return {"variant": self.model.variant.value}, {}

    def _restore(self, text, meta, arrays):
        self.model = self._build(meta.get("variant"))
        self._llr = llr_function(self.model)


class QuantizedNpVerifier(Verifier):
    """Histogram likelihood ratio over a dB quantizer of the single attenuation."""
    kind = ModelKind.NP_QUANTIZED

    def _fit(self, train, validation) -> dict:
        sec = self.section.quantized
        self.pdfs = fit_quantized_pdfs(train.of_label(-1).a, train.of_label(1).a, sec.n_levels, sec.pseudo_count)
        return {"n_levels": self.pdfs.n_levels, "raw_draws": train.raw_draws}

    def _scores(self, data):
        return -np.asarray(self.pdfs.llr(data.a[:, 0]), dtype=float)

    def _state(self):
        return (
            {"pseudo_count": f"{self.pdfs.pseudo_count:.17g}"},
            {"edges": self.pdfs.edges, "p_h0": self.pdfs.p_h0, "p_h1": self.pdfs.p_h1},
        )

    def _restore(self, text, meta, arrays):
        self.pdfs = QuantizedPdfPair(
            edges=np.atleast_1d(arrays["edges"]),
            p_h0=np.atleast_1d(arrays["p_h0"]),
            p_h1=np.atleast_1d(arrays["p_h1"]),
            pseudo_count=float(meta.get("pseudo_count", "1")),
        )


class GlrtVerifier(Verifier):
    """
    Thresholds p(a|H0) alone; score -log p(a|H0). The ring uses its closed
    form, any other run a kernel density of the H0 training vectors.
    """
    kind = ModelKind.GLRT

    def _fit(self, train, validation) -> dict:
        self.ring = ring_model(self.experiment)
        if self.ring is not None:
            return {"density": "closed-form"}
        sec = self.section.glrt
        self.kde = KdeDensity(train.a, sec.kde_max_points, np.random.default_rng(self.seed), sec.bw_method)
        return {"density": "kde", "kde_points": int(self.kde.kde.n), "bandwidth_factor": float(self.kde.kde.factor)}

    def _scores(self, data):
        if self.ring is not None:
            return -np.asarray(ring_log_density(self.ring, data.a[:, 0], RegionLabel.H0), dtype=float)
        return -self.kde.log_density(data.a)

    def _state(self):
        if self.ring is not None:
            return {"density": "closed-form"}, {}
        return (
            {"density": "kde", "bandwidth_factor": f"{self.kde.kde.factor:.17g}"},
            {"samples_db": self.kde.kde.dataset.T},
        )

    def _restore(self, text, meta, arrays):
        self.ring = ring_model(self.experiment) if meta.get("density") == "closed-form" else None
        if self.ring is None:
            samples = db_to_linear(np.atleast_2d(arrays["samples_db"]))
            self.kde = KdeDensity(samples, max_points=samples.shape[0], bw_method=float(meta["bandwidth_factor"]))


# ==========================
# 神经网络
# ==========================
class _MlpVerifier(Verifier):
    def _train_kwargs(self) -> dict:
        sec = self.section.mlp
        return dict(learning_rate=sec.learning_rate, epochs=sec.epochs, batch_size=sec.batch_size, seed=self.seed)

    def _report(self) -> dict:
        trace = self.model.loss_trace
        return {"loss_initial": float(trace[0]), "loss_final": float(trace[-1]), "epochs": len(trace) - 1}

    def dump(self) -> str:
        return dump_mlp(self.model, extra_meta=self._tag())

    def _restore(self, text, meta, arrays):
        self.model = load_mlp(text)


class MlpCeVerifier(_MlpVerifier):
    kind = ModelKind.MLP_CE

    def _fit(self, train, validation) -> dict:
        config = classifier_config(self.n_aps, self.section.mlp.hidden, **self._train_kwargs())
        self.model = train_ce(config, train)
        return self._report()

    def _scores(self, data):
        return forward(self.model, data.a)


class MlpMseVerifier(MlpCeVerifier):
    kind = ModelKind.MLP_MSE

    def _fit(self, train, validation) -> dict:
        config = classifier_config(self.n_aps, self.section.mlp.hidden, **self._train_kwargs())
        self.model = train_mse(config, train)
        return self._report()


class AutoencoderVerifier(_MlpVerifier):
    """Reconstruction error of an H0-trained autoencoder."""
    kind = ModelKind.AUTOENCODER

    def _fit(self, train, validation) -> dict:
        config = autoencoder_config(self.n_aps, self.section.mlp.hidden, **self._train_kwargs())
        self.model = train_autoencoder(config, train)
        return {**self._report(), "layers": self.model.layer_sizes}

    def _scores(self, data):
        return ae_score(self.model, data.a)


# ==========================
# LS-SVM
# ==========================
class _SvmVerifier(Verifier):
    def _kernel_config(self):
        return self.section.kernel.model_copy(update={"seed": self.seed})

    def _report(self) -> dict:
        return {
            "residual": self.model.residual,
            "gamma_k": self.model.gamma_k,
            "C": self.model.C,
            "support": int(self.model.support.shape[0]),
            "ridge": self.model.ridge,
        }

    def dump(self) -> str:
        return dump_svm(self.model, extra_meta=self._tag())

    def _restore(self, text, meta, arrays):
        self.model = load_svm(text)


class LssvmVerifier(_SvmVerifier):
    kind = ModelKind.LSSVM

    def _fit(self, train, validation) -> dict:
        config = self._kernel_config()
        extra = {}
        if self.section.grid_search:
            if validation is None or min(validation.counts().values()) == 0:
                self.logger.warning("⚠️ grid search skipped: the validation split lacks one of the labels")
            else:
                config, val_auc = grid_search(train, validation, base=config)
                extra["validation_auc"] = val_auc
        self.model = train_twoclass(train, config)
        return {**self._report(), **extra}

    def _scores(self, data):
        return score(self.model, data.a)


class OcLssvmVerifier(_SvmVerifier):
    kind = ModelKind.OCLSSVM

    def _fit(self, train, validation) -> dict:
        self.model = train_oneclass(train, self._kernel_config())
        return {**self._report(), "orientation": self.model.orientation}

    def _scores(self, data):
        return oc_score(self.model, data.a)


# ==========================
# 距离估计基线
# ==========================
class EdaVerifier(Verifier):
    """Signed border distance of the least-squares position; links' LOS state taken from the true positions."""
    kind = ModelKind.EDA

    def _build(self) -> EdaModel:
        sec = self.section.eda
        scenario = self.experiment.scenario
        d_min = min(sec.d_min, scenario.r_min) if isinstance(scenario, RingScenario) else sec.d_min
        return EdaModel(
            scenario=scenario, params=channel_params(self.experiment), d_delta=sec.d_delta,
            n_starts=sec.n_starts, tol=sec.tol, max_iter=sec.max_iter, d_min=d_min, seed=self.seed,
        )

    def _fit(self, train, validation) -> dict:
        self.model = self._build()
        return {"n_starts": self.model.n_starts, "d_max": self.model.distance_cap}

    def _scores(self, data):
        return eda_scores(self.model, data.a, los=self.experiment.scenario.los_matrix(data.positions))

    def _restore(self, text, meta, arrays):
        self.model = self._build()
