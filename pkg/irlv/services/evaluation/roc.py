# irlv/services/evaluation/roc.py
"""
Threshold calibration, error-rate estimates and ROC curves.

Scores are oriented so that larger values favour H1: a verifier decides +1
iff score > threshold. Hence P_FA(th) = #(H0 scores > th) / n0 and
P_MD(th) = #(H1 scores <= th) / n1.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.stats import norm

from irlv.core.exceptions import DataException
from irlv.core.logger import get_logger
from irlv.enums import ErrorCodeEnum

logger = get_logger(__name__)

ROC_COLUMNS = ["threshold", "p_fa", "p_md", "p_fa_lo", "p_fa_hi", "p_md_lo", "p_md_hi"]


def wilson_interval(successes, trials, confidence: float = 0.95) -> Tuple[np.ndarray, np.ndarray]:
    """Wilson score interval of a binomial proportion; trials of zero give [0, 1]."""
    k = np.asarray(successes, dtype=float)
    n = np.asarray(trials, dtype=float)
    z = norm.ppf(0.5 + confidence / 2.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(n > 0, k / n, 0.0)
        denom = 1.0 + z ** 2 / n
        centre = (p + z ** 2 / (2.0 * n)) / denom
        half = z / denom * np.sqrt(p * (1.0 - p) / n + z ** 2 / (4.0 * n ** 2))
    lo = np.where(n > 0, np.clip(centre - half, 0.0, 1.0), 0.0)
    hi = np.where(n > 0, np.clip(centre + half, 0.0, 1.0), 1.0)
    return lo, hi


@dataclass
class RocCurve:
    thresholds: np.ndarray
    p_fa: np.ndarray
    p_md: np.ndarray
    n_h0: int
    n_h1: int
    p_fa_lo: Optional[np.ndarray] = None
    p_fa_hi: Optional[np.ndarray] = None
    p_md_lo: Optional[np.ndarray] = None
    p_md_hi: Optional[np.ndarray] = None
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        self.thresholds = np.asarray(self.thresholds, dtype=float)
        self.p_fa = np.asarray(self.p_fa, dtype=float)
        self.p_md = np.asarray(self.p_md, dtype=float)
        if not (self.thresholds.shape == self.p_fa.shape == self.p_md.shape):
            raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, "ROC columns must have equal length")
        if np.any((self.p_fa < 0) | (self.p_fa > 1) | (self.p_md < 0) | (self.p_md > 1)):
            raise DataException(ErrorCodeEnum.NON_FINITE, "ROC probabilities must lie in [0, 1]")
        if self.p_fa_lo is None:
            self.p_fa_lo, self.p_fa_hi = wilson_interval(np.round(self.p_fa * self.n_h0), self.n_h0)
            self.p_md_lo, self.p_md_hi = wilson_interval(np.round(self.p_md * self.n_h1), self.n_h1)

    def __len__(self) -> int:
        return len(self.p_fa)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "threshold": self.thresholds,
            "p_fa": self.p_fa,
            "p_md": self.p_md,
            "p_fa_lo": self.p_fa_lo,
            "p_fa_hi": self.p_fa_hi,
            "p_md_lo": self.p_md_lo,
            "p_md_hi": self.p_md_hi,
        }, columns=ROC_COLUMNS)

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, n_h0: int = 0, n_h1: int = 0, metadata=None) -> "RocCurve":
        missing = [c for c in ROC_COLUMNS if c not in frame.columns]
        if missing:
            raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"ROC table lacks columns {missing}")
        return cls(
            frame["threshold"].to_numpy(), frame["p_fa"].to_numpy(), frame["p_md"].to_numpy(),
            n_h0, n_h1,
            frame["p_fa_lo"].to_numpy(), frame["p_fa_hi"].to_numpy(),
            frame["p_md_lo"].to_numpy(), frame["p_md_hi"].to_numpy(),
            metadata=dict(metadata or {}),
        )


@dataclass(frozen=True)
class RateEstimate:
    p_fa: float
    p_md: float
    n_h0: int
    n_h1: int
    p_fa_ci: Tuple[float, float]
    p_md_ci: Tuple[float, float]

    def as_tuple(self) -> Tuple[float, float]:
        return self.p_fa, self.p_md

    def to_dict(self) -> dict:
        return {
            "p_fa": self.p_fa, "p_md": self.p_md, "n_h0": self.n_h0, "n_h1": self.n_h1,
            "p_fa_ci": list(self.p_fa_ci), "p_md_ci": list(self.p_md_ci),
        }


# --- 阈值与错误率 ---
def calibrate_threshold(scores_h0: Sequence[float], target_fa: float) -> float:
    """
    Tightest threshold whose empirical FA on ``scores_h0`` does not exceed
    ``target_fa``: the (k+1)-th largest score with k = floor(target_fa * n).
    Ties land below the threshold, so they only lower the FA.
    """
    scores = np.sort(np.asarray(scores_h0, dtype=float))[::-1]
    n = scores.size
    if n == 0:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, "threshold calibration needs H0 scores")
    if not 0 < target_fa <= 1:
        raise ValueError(f"target_fa must lie in (0, 1], got {target_fa}")
    if scores[0] == scores[-1]:
        logger.warning("⚠️ constant H0 scores: the threshold cannot resolve any FA level between 0 and 1")
    k = int(np.floor(target_fa * n + 1e-9))
    if k >= n:
        return float(np.nextafter(scores[-1], -np.inf))
    if k == 0:
        logger.warning(f"⚠️ target_fa={target_fa:g} is below 1/{n}; using the largest H0 score")
    return float(scores[k])


def estimate_rates(decisions, truth) -> RateEstimate:
    """Empirical P_FA and P_MD with 95% Wilson intervals."""
    d = np.asarray(decisions).reshape(-1)
    t = np.asarray(truth).reshape(-1)
    if d.shape != t.shape:
        raise DataException(ErrorCodeEnum.DIMENSION_MISMATCH, f"{d.size} decisions for {t.size} labels")
    h0, h1 = t == -1, t == 1
    n0, n1 = int(h0.sum()), int(h1.sum())
    if n0 == 0 or n1 == 0:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, f"both classes needed, got {n0} H0 and {n1} H1")
    fa, md = int(np.sum(d[h0] == 1)), int(np.sum(d[h1] == -1))
    (fa_lo, md_lo), (fa_hi, md_hi) = wilson_interval([fa, md], [n0, n1])
    return RateEstimate(fa / n0, md / n1, n0, n1, (float(fa_lo), float(fa_hi)), (float(md_lo), float(md_hi)))


# --- ROC ---
def roc_from_scores(
    scores_h0,
    scores_h1,
    n_thresholds: Optional[int] = None,
    metadata: Optional[dict] = None,
) -> RocCurve:
    """
    Thresholds at every midpoint between distinct scores plus one below the
    minimum and one above the maximum, so both (1, 0) and (0, 1) are on the
    curve. ``n_thresholds`` keeps that many interior thresholds by quantile.
    """
    s0 = np.sort(np.asarray(scores_h0, dtype=float).reshape(-1))
    s1 = np.sort(np.asarray(scores_h1, dtype=float).reshape(-1))
    if s0.size == 0 or s1.size == 0:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, "ROC sweep needs scores of both classes")
    if not (np.all(np.isfinite(s0)) and np.all(np.isfinite(s1))):
        raise DataException(ErrorCodeEnum.NON_FINITE, "scores must be finite")

    distinct = np.unique(np.concatenate([s0, s1]))
    interior = 0.5 * (distinct[:-1] + distinct[1:])
    if n_thresholds is not None and interior.size > n_thresholds:
        pick = np.unique(np.round(np.linspace(0, interior.size - 1, n_thresholds)).astype(int))
        interior = interior[pick]
    span = max(1.0, float(distinct[-1] - distinct[0]))
    thresholds = np.concatenate([[distinct[0] - span], interior, [distinct[-1] + span]])

    p_fa = (s0.size - np.searchsorted(s0, thresholds, side="right")) / s0.size
    p_md = np.searchsorted(s1, thresholds, side="right") / s1.size
    return RocCurve(thresholds, p_fa, p_md, int(s0.size), int(s1.size), metadata=dict(metadata or {}))


def roc_sweep(
    score_fn: Callable,
    test_h0,
    test_h1,
    n_thresholds: Optional[int] = None,
    metadata: Optional[dict] = None,
) -> RocCurve:
    return roc_from_scores(score_fn(test_h0), score_fn(test_h1), n_thresholds, metadata)


def lower_envelope(curve: RocCurve) -> Tuple[np.ndarray, np.ndarray]:
    """Distinct P_FA values ascending, each with the smallest P_MD reachable at that FA or less."""
    order = np.lexsort((curve.p_md, curve.p_fa))
    fa, md = curve.p_fa[order], curve.p_md[order]
    md = np.minimum.accumulate(md)
    keep = np.concatenate([fa[1:] != fa[:-1], [True]])
    # 同一 FA 取最后一个 (累计最小值)
    return fa[keep], md[keep]


def md_at_fa(curve: RocCurve, p_fa: float) -> float:
    """P_MD at the requested FA, linear in P_FA between curve points."""
    fa, md = lower_envelope(curve)
    return float(np.interp(p_fa, fa, md))


def auc(curve: RocCurve) -> float:
    """Area under P_D = 1 - P_MD against P_FA."""
    fa, md = lower_envelope(curve)
    if fa[0] > 0:
        fa, md = np.concatenate([[0.0], fa]), np.concatenate([[1.0], md])
    if fa[-1] < 1:
        fa, md = np.concatenate([fa, [1.0]]), np.concatenate([md, [0.0]])
    return float(trapezoid(1.0 - md, fa))


def average_curves(curves: Sequence[RocCurve], grid: Optional[np.ndarray] = None,
                   metadata: Optional[dict] = None) -> RocCurve:
    """
    Mean P_MD over curves at matched P_FA (linear interpolation on a common
    grid). Intervals are Wilson intervals of the pooled counts.
    """
    if not curves:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, "no curves to average")
    if grid is None:
        grid = np.unique(np.concatenate([np.linspace(0.0, 1.0, 1001), np.logspace(-4, 0, 401)]))
    per_curve = []
    for c in curves:
        fa, md = lower_envelope(c)
        per_curve.append(np.interp(grid, fa, md))
    n_h0 = int(sum(c.n_h0 for c in curves))
    n_h1 = int(sum(c.n_h1 for c in curves))
    meta = dict(metadata or {})
    meta.setdefault("n_curves", len(curves))
    return RocCurve(np.full(grid.shape, np.nan), grid, np.mean(per_curve, axis=0), n_h0, n_h1, metadata=meta)


def operating_points(curve: RocCurve, targets: Sequence[float]) -> List[dict]:
    return [{"p_fa": float(t), "p_md": md_at_fa(curve, t)} for t in targets]


def pooled_rates(estimates: Sequence[RateEstimate]) -> RateEstimate:
    """Rates of the pooled error counts of several independent test sets."""
    if not estimates:
        raise DataException(ErrorCodeEnum.EMPTY_CLASS, "no rate estimates to pool")
    n0 = sum(e.n_h0 for e in estimates)
    n1 = sum(e.n_h1 for e in estimates)
    fa = sum(int(round(e.p_fa * e.n_h0)) for e in estimates)
    md = sum(int(round(e.p_md * e.n_h1)) for e in estimates)
    (fa_lo, md_lo), (fa_hi, md_hi) = wilson_interval([fa, md], [n0, n1])
    return RateEstimate(fa / n0, md / n1, n0, n1, (float(fa_lo), float(fa_hi)), (float(md_lo), float(md_hi)))


def rates_at(scores_h0, scores_h1, threshold: float) -> RateEstimate:
    """Error rates of the rule ``+1 iff score > threshold`` on labelled test scores."""
    s0 = np.asarray(scores_h0, dtype=float).reshape(-1)
    s1 = np.asarray(scores_h1, dtype=float).reshape(-1)
    decisions = np.where(np.concatenate([s0, s1]) > threshold, 1, -1)
    truth = np.concatenate([np.full(s0.size, -1), np.full(s1.size, 1)])
    return estimate_rates(decisions, truth)
