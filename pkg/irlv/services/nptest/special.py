# irlv/services/nptest/special.py
"""
Special functions behind the closed-form log-likelihood ratios.

Values come from scipy.special; the log-domain helpers keep differences of
incomplete gamma and normal CDF values finite where the plain values
underflow or cancel.
"""
from typing import Union

import numpy as np
from scipy import special

from irlv.core.exceptions import NumericException
from irlv.enums import ErrorCodeEnum

ArrayLike = Union[float, np.ndarray]

_TINY = np.finfo(float).tiny
_EPS = np.finfo(float).eps


def _out(values: np.ndarray, like) -> Union[float, np.ndarray]:
    return float(values) if np.ndim(like) == 0 else values


def inc_gamma_upper(gamma: float, b: ArrayLike):
    """Upper incomplete gamma function, integral of t^(gamma-1) e^-t over [b, inf)."""
    b_arr = np.asarray(b, dtype=float)
    if not gamma > 0 or np.any(~(b_arr >= 0)):
        raise NumericException(
            ErrorCodeEnum.DOMAIN_ERROR,
            message=f"inc_gamma_upper needs gamma > 0 and b >= 0, got gamma={gamma}",
        )
    return _out(special.gamma(gamma) * special.gammaincc(gamma, b_arr), b)


def erf(x: ArrayLike):
    x_arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x_arr)):
        raise NumericException(ErrorCodeEnum.DOMAIN_ERROR, message="erf needs finite arguments")
    return _out(special.erf(x_arr), x)


def _log_q_continued_fraction(s: float, x: np.ndarray, max_iter: int = 300) -> np.ndarray:
    """log of the regularized upper incomplete gamma for x > s + 1 (modified Lentz)."""
    b = x + 1.0 - s
    c = np.full_like(x, 1.0 / _TINY)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, max_iter + 1):
        an = -i * (i - s)
        b = b + 2.0
        d = an * d + b
        d = np.where(np.abs(d) < _TINY, _TINY, d)
        c = b + an / c
        c = np.where(np.abs(c) < _TINY, _TINY, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) < _EPS):
            break
    return -x + s * np.log(x) - special.gammaln(s) + np.log(h)


def log_gammaincc(s: float, x: ArrayLike) -> np.ndarray:
    """log Q(s, x), finite even where Q itself underflows."""
    x = np.asarray(x, dtype=float)
    q = special.gammaincc(s, x)
    out = np.empty_like(x)
    ok = q > 1e-280
    out[ok] = np.log(q[ok])
    if np.any(~ok):
        out[~ok] = _log_q_continued_fraction(s, x[~ok])
    return out


def log_gammainc(s: float, x: ArrayLike) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log(special.gammainc(s, x))


def _log_sub(big: np.ndarray, small: np.ndarray) -> np.ndarray:
    """log(exp(big) - exp(small)) for big >= small."""
    with np.errstate(divide="ignore", invalid="ignore"):
        diff = small - big
        return np.where(np.isneginf(big), -np.inf, big + np.log1p(-np.exp(np.minimum(diff, 0.0))))


def log_gammaincc_diff(s: float, x1: ArrayLike, x2: ArrayLike) -> np.ndarray:
    """
    log(Q(s, x1) - Q(s, x2)) for 0 <= x1 <= x2.

    Uses the lower function when both points sit left of the mode, where the
    upper values are close to one and would cancel.
    """
    x1, x2 = np.broadcast_arrays(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
    out = np.empty(x1.shape)
    left = x2 <= s
    if np.any(left):
        out[left] = _log_sub(log_gammainc(s, x2[left]), log_gammainc(s, x1[left]))
    if np.any(~left):
        out[~left] = _log_sub(log_gammaincc(s, x1[~left]), log_gammaincc(s, x2[~left]))
    return out


def log_ndtr_diff(lo: ArrayLike, hi: ArrayLike) -> np.ndarray:
    """log(Phi(hi) - Phi(lo)) for lo <= hi, using the mirrored tail when both are positive."""
    lo, hi = np.broadcast_arrays(np.asarray(lo, dtype=float), np.asarray(hi, dtype=float))
    right = lo > 0
    big = np.where(right, special.log_ndtr(-lo), special.log_ndtr(hi))
    small = np.where(right, special.log_ndtr(-hi), special.log_ndtr(lo))
    return _log_sub(big, small)
