import math

import numpy as np
import pytest
from scipy import integrate

from irlv.core.exceptions import DataException, NumericException
from irlv.enums import ErrorCodeEnum, LlrVariant, RegionLabel
from irlv.services.nptest import (
    KdeDensity,
    LlrModel,
    erf,
    fading_log_density,
    find_llr_crossing,
    fit_quantized_pdfs,
    glrt_decide,
    inc_gamma_upper,
    llr_fading,
    llr_fading_nu2,
    llr_fading_nu3,
    llr_function,
    llr_numeric_oracle,
    llr_shadowing,
    noiseless_decide,
    np_decide,
    ring_density_h0,
    ring_log_density,
)


def _path_loss_linear(model: LlrModel, r):
    return (model.wavenumber * np.asarray(r, dtype=float)) ** model.nu


# 测试特殊函数
def test_erf_reference_value():
    assert erf(1.0) == pytest.approx(0.8427007929, abs=1e-10)
    assert np.allclose(erf(np.array([-1.0, 0.0])), [-0.8427007929, 0.0])


def test_erf_rejects_non_finite():
    with pytest.raises(NumericException):
        erf(np.inf)


@pytest.mark.parametrize("gamma,b", [(2.0, 0.5), (5.0 / 3.0, 1.2), (0.5, 3.0), (1.0, 0.0)])
def test_inc_gamma_upper_matches_quadrature(gamma, b):
    expected, _ = integrate.quad(lambda t: t ** (gamma - 1.0) * math.exp(-t), b, np.inf)
    assert inc_gamma_upper(gamma, b) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("b", [0.0, 0.3, 1.0, 7.5, 40.0])
def test_inc_gamma_upper_closed_forms(b):
    assert inc_gamma_upper(1.0, b) == pytest.approx(math.exp(-b), rel=1e-10)
    assert inc_gamma_upper(5.0 / 3.0, 0.0) == pytest.approx(math.gamma(5.0 / 3.0), rel=1e-10)


def test_erf_is_odd(rng):
    x = rng.normal(0.0, 2.0, 50)
    assert np.allclose(erf(-x), -erf(x), atol=1e-15)
    assert erf(0.0) == 0.0


def test_inc_gamma_upper_domain():
    with pytest.raises(NumericException) as exc:
        inc_gamma_upper(0.0, 1.0)
    assert exc.value.code_enum is ErrorCodeEnum.DOMAIN_ERROR
    with pytest.raises(NumericException):
        inc_gamma_upper(1.0, -0.1)


def _bulk_grid(model: LlrModel, n: int = 200) -> np.ndarray:
    """n log-spaced attenuations between the path losses of R_min and R_out, kept where both densities exceed 1e-300."""
    lo, hi = np.log10(_path_loss_linear(model, [model.r_min, model.r_out]))
    a = np.logspace(lo, hi, n)
    floor = math.log(1e-300)
    bulk = (ring_log_density(model, a, RegionLabel.H0) > floor) & (ring_log_density(model, a, RegionLabel.H1) > floor)
    return a[bulk]


# 闭式 LLR 与数值积分一致
@pytest.mark.parametrize("nu,variant,fn", [
    (2.0, LlrVariant.FADING_NU2, llr_fading_nu2),
    (3.0, LlrVariant.FADING_NU3, llr_fading_nu3),
])
def test_fading_llr_matches_numeric_oracle(nu, variant, fn):
    model = LlrModel(variant=variant, nu=nu, fading=True)
    a = _bulk_grid(model)
    assert a.size >= 150
    closed = fn(model, a)
    oracle = llr_numeric_oracle(model, a)
    assert np.allclose(closed, oracle, rtol=1e-6, atol=1e-8)


@pytest.mark.parametrize("sigma", [0.1, 1.8, 6.0])
def test_shadowing_llr_matches_numeric_oracle_on_grid(sigma):
    model = LlrModel(variant=LlrVariant.SHADOWING_UNCORR, nu=2.0, sigma_s_db=sigma, fading=False)
    a = _bulk_grid(model)
    # sigma = 0.1 dB 时只有 r_in 附近两种密度都不可忽略
    assert a.size >= 20
    assert np.allclose(llr_shadowing(model, a), llr_numeric_oracle(model, a), rtol=1e-6, atol=1e-8)


def test_fading_llr_is_non_increasing():
    model = LlrModel(variant=LlrVariant.FADING_NU2, nu=2.0)
    a = np.logspace(*np.log10(_path_loss_linear(model, [0.05, 20.0])), 400)
    assert np.all(np.diff(llr_fading_nu2(model, a)) <= 1e-12)


def test_general_fading_llr_matches_numeric_oracle():
    model = LlrModel(variant=LlrVariant.FADING, nu=2.7, fading=True)
    a = _path_loss_linear(model, [0.5, 2.0, 6.0])
    assert np.allclose(llr_fading(model, a), llr_numeric_oracle(model, a), rtol=1e-6, atol=1e-8)


def test_fading_density_integrates_to_one():
    model = LlrModel(variant=LlrVariant.FADING_NU2, nu=2.0, fading=True)
    lo, hi = math.log(_path_loss_linear(model, 0.01)), math.log(_path_loss_linear(model, 10.0) * 1e6)
    # 按 ln a 积分
    total, _ = integrate.quad(
        lambda u: math.exp(u + fading_log_density(model, math.exp(u), RegionLabel.H0)), lo, hi, limit=500,
    )
    assert total == pytest.approx(1.0, abs=1e-4)


def test_llr_scalar_in_scalar_out():
    model = LlrModel(variant=LlrVariant.FADING_NU2, nu=2.0)
    value = llr_function(model)(float(_path_loss_linear(model, 1.0)))
    assert isinstance(value, float)
    assert value > 0


def test_variant_must_match_channel():
    with pytest.raises(ValueError):
        LlrModel(variant=LlrVariant.FADING_NU3, nu=2.0)
    with pytest.raises(ValueError):
        LlrModel(variant=LlrVariant.SHADOWING_UNCORR, fading=True)
    with pytest.raises(NumericException):
        llr_fading_nu3(LlrModel(variant=LlrVariant.FADING, nu=2.0), 1e4)


def test_shadowing_llr_needs_positive_sigma():
    model = LlrModel(variant=LlrVariant.NUMERIC_ORACLE, fading=False, sigma_s_db=0.0)
    with pytest.raises(NumericException) as exc:
        llr_numeric_oracle(model, 1e4)
    assert exc.value.code_enum is ErrorCodeEnum.DEGENERATE_SHADOWING


def test_llr_crossing_is_a_root():
    model = LlrModel(variant=LlrVariant.FADING_NU2, nu=2.0)
    a0 = find_llr_crossing(model)
    assert llr_fading_nu2(model, a0) == pytest.approx(0.0, abs=1e-8)
    assert llr_fading_nu2(model, 0.5 * a0) > 0 > llr_fading_nu2(model, 2.0 * a0)


def test_decisions():
    assert np_decide(0.5, 0.0) == -1
    assert np_decide(np.array([-1.0, 1.0]), 0.0).tolist() == [1, -1]
    assert glrt_decide(np.array([0.1, 0.3]), 0.2).tolist() == [1, -1]
    model = LlrModel(variant=LlrVariant.FADING_NU2, nu=2.0)
    assert noiseless_decide(model, _path_loss_linear(model, 1.0)) == -1
    assert noiseless_decide(model, _path_loss_linear(model, 5.0)) == 1


# 门限升高时 +1 不会变回 -1
def test_np_decide_is_monotone_in_threshold(rng):
    values = rng.normal(0.0, 3.0, 2000)
    thresholds = np.linspace(-20.0, 20.0, 81)
    decisions = np.array([np_decide(values, lam) for lam in thresholds])
    assert np.all(np.diff(decisions, axis=0) >= 0)
    assert np.all(decisions[0] == -1) and np.all(decisions[-1] == 1)
    assert np_decide(1.25, 1.25) == -1


# 测试量化直方图
def test_quantized_pdfs(rng):
    h0 = 10.0 ** (rng.normal(40.0, 3.0, 5000) / 10.0)
    h1 = 10.0 ** (rng.normal(60.0, 3.0, 5000) / 10.0)
    pdfs = fit_quantized_pdfs(h0, h1, n_levels=50, pseudo_count=1.0)
    assert pdfs.n_levels == 50
    assert pdfs.p_h0.sum() == pytest.approx(1.0)
    assert pdfs.p_h1.sum() == pytest.approx(1.0)
    assert np.all(pdfs.p_h0 > 0) and np.all(pdfs.p_h1 > 0)
    assert pdfs.llr(1e4) > 0 > pdfs.llr(1e6)
    # 超出边界的值落入端点单元
    assert pdfs.bin_index(np.array([1.0, 1e12])).tolist() == [0, 49]
    assert list(pdfs.to_frame().columns) == ["lo_db", "hi_db", "p_h0", "p_h1"]


def test_quantized_pdfs_need_both_classes():
    with pytest.raises(DataException):
        fit_quantized_pdfs(np.array([]), np.array([1e4]))
    with pytest.raises(DataException):
        fit_quantized_pdfs(np.ones((3, 2)), np.ones((3, 2)))


# 测试 GLRT 密度
def test_ring_density_and_kde_agree(rng):
    model = LlrModel(variant=LlrVariant.FADING_NU2, nu=2.0)
    r = np.sqrt(rng.uniform(model.r_min ** 2, model.r_in ** 2, 20000))
    a = _path_loss_linear(model, r) / rng.exponential(1.0, r.size)
    kde = KdeDensity(a, max_points=5000, rng=rng)
    points = _path_loss_linear(model, np.array([0.8, 1.5]))
    exact = ring_density_h0(model)(points)
    assert np.allclose(kde(points), exact, rtol=0.25)


def test_kde_checks_dimensions(rng):
    kde = KdeDensity(10.0 ** (rng.normal(50.0, 5.0, (100, 2)) / 10.0))
    with pytest.raises(DataException):
        kde.log_density(np.ones((2, 3)))
    with pytest.raises(DataException):
        KdeDensity(np.array([[1.0]]))
