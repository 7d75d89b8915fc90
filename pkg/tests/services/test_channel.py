import numpy as np
import pytest

from irlv.config.config_settings.config_schema import ShadowingSolverConfig
from irlv.core.exceptions import ChannelException, DataException
from irlv.enums import ErrorCodeEnum, ShadowingAcrossAps, ShadowingKind
from irlv.schemas.channel import ChannelParams
from irlv.services.channel import (
    AttenuationDataset,
    FeatureVector,
    average_fading,
    build_dataset,
    db_to_linear,
    draw_attenuations,
    exponential_covariance,
    generate_shadowing_map,
    linear_to_db,
    path_loss_los_db,
    path_loss_nlos_db,
)


# 测试路径损耗的参考值
def test_los_path_loss_reference(params):
    assert path_loss_los_db(params, 10.0) == pytest.approx(58.97, abs=0.01)
    values = path_loss_los_db(params, np.array([1.0, 10.0, 100.0]))
    assert np.allclose(np.diff(values), 20.0)


def test_nlos_path_loss_reference(params):
    assert path_loss_nlos_db(params, 100.0, 15.0) == pytest.approx(91.08, abs=0.01)


def test_path_loss_rejects_non_positive_distance(params):
    with pytest.raises(ChannelException) as exc:
        path_loss_los_db(params, 0.0)
    assert exc.value.code_enum is ErrorCodeEnum.NON_POSITIVE_DISTANCE
    with pytest.raises(ChannelException):
        path_loss_nlos_db(params, np.array([10.0, -1.0]), 15.0)


def test_db_linear_conversion():
    assert np.allclose(linear_to_db(db_to_linear([-3.0, 0.0, 58.97])), [-3.0, 0.0, 58.97])


# 测试阴影相关性: 相距 d_c 时相关系数为 e^-1
def test_exponential_covariance_at_decorrelation_distance():
    cov = exponential_covariance(np.array([[0.0, 0.0], [75.0, 0.0]]), 8.0, 75.0)
    assert cov[0, 0] == pytest.approx(64.0)
    assert cov[0, 1] / cov[0, 0] == pytest.approx(np.exp(-1.0))


def test_point_shadowing_empirical_correlation(rng):
    params = ChannelParams(sigma_s_db=8.0, d_c=75.0, shadowing=ShadowingKind.POINTS)
    pts = np.array([[0.0, 0.0], [75.0, 0.0]])
    draws = np.array([generate_shadowing_map(params, pts, rng).values_at(pts)[:, 0] for _ in range(3000)])
    assert np.std(draws, axis=0) == pytest.approx([8.0, 8.0], rel=0.06)
    assert np.corrcoef(draws.T)[0, 1] == pytest.approx(np.exp(-1.0), abs=0.06)


def test_grid_shadowing_correlation(rng):
    params = ChannelParams(sigma_s_db=4.0, d_c=50.0, shadowing=ShadowingKind.GRID)
    pts = np.array([[0.0, 0.0], [1000.0, 1000.0]])
    lag = 10  # d_c / spacing
    products, squares = [], []
    for _ in range(10):
        m = generate_shadowing_map(params, pts, rng, bounding_box=(0.0, 0.0, 1000.0, 1000.0))
        assert m.kind is ShadowingKind.GRID
        field = m.grid_values[:, :, 0]
        products.append(np.mean(field[:-lag, :] * field[lag:, :]))
        squares.append(np.mean(field ** 2))
    assert np.mean(squares) == pytest.approx(16.0, rel=0.15)
    assert np.mean(products) / np.mean(squares) == pytest.approx(np.exp(-1.0), abs=0.1)


def test_points_switch_to_grid_above_limit(rng):
    params = ChannelParams(sigma_s_db=4.0, d_c=50.0)
    pts = rng.uniform(0.0, 200.0, (50, 2))
    m = generate_shadowing_map(params, pts, rng, solver=ShadowingSolverConfig(max_exact_points=10))
    assert m.kind is ShadowingKind.GRID
    assert m.values_at(pts).shape == (50, 1)


def test_shadowing_map_is_frozen(rng):
    params = ChannelParams(sigma_s_db=6.0, d_c=20.0)
    pts = rng.uniform(0.0, 100.0, (30, 2))
    m = generate_shadowing_map(params, pts, rng, n_aps=3)
    assert np.array_equal(m.values_at(pts[::-1]), m.values_at(pts)[::-1])
    assert m.values_at(pts).shape == (30, 3)
    with pytest.raises(ChannelException) as exc:
        m.values_at([[500.0, 500.0]])
    assert exc.value.code_enum is ErrorCodeEnum.POSITION_NOT_IN_MAP


def test_shared_shadowing_repeats_one_field(rng):
    params = ChannelParams(sigma_s_db=6.0, across_aps=ShadowingAcrossAps.SHARED)
    pts = rng.uniform(0.0, 100.0, (20, 2))
    values = generate_shadowing_map(params, pts, rng, n_aps=4).values_at(pts)
    assert np.allclose(values, values[:, :1])


def test_no_shadowing_when_sigma_is_zero(params, rng):
    m = generate_shadowing_map(params, [[1.0, 1.0]], rng, n_aps=2)
    assert m.kind is ShadowingKind.NONE
    assert np.array_equal(m.values_at([[3.0, 4.0]]), np.zeros((1, 2)))


# 测试衰落与平均
def test_fading_gain_is_exponential(rng):
    mean_db = np.full((40_000, 1), 60.0)
    a = draw_attenuations(mean_db, True, 1, rng)
    gains = 1.0 / a[:, 0]
    assert np.mean(gains) == pytest.approx(1e-6, rel=0.03)
    assert np.std(gains) / np.mean(gains) == pytest.approx(1.0, rel=0.05)
    assert np.array_equal(draw_attenuations(mean_db[:3], False, 5, rng), np.full((3, 1), 1e6))


# 指数增益的中位数为均值乘 ln 2, 衰减取倒数
def test_fading_attenuation_median_in_db(rng):
    a = draw_attenuations(np.full((100_000, 1), 60.0), True, 1, rng)
    expected = 60.0 - 10.0 * np.log10(np.log(2.0))
    assert np.median(linear_to_db(a[:, 0])) == pytest.approx(expected, abs=0.1)


def test_db_round_trip_precision():
    x = np.linspace(0.0, 200.0, 2001)
    assert np.max(np.abs(linear_to_db(db_to_linear(x)) - x)) <= 1e-12


# 不同 AP 的阴影场相互独立
def test_shadowing_independent_across_aps(rng):
    params = ChannelParams(sigma_s_db=6.0, d_c=75.0, shadowing=ShadowingKind.POINTS)
    pts = np.array([[0.0, 0.0], [40.0, 0.0]])
    draws = np.array([generate_shadowing_map(params, pts, rng, n_aps=3).values_at(pts) for _ in range(3000)])
    # draws: (maps, points, aps)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        assert abs(np.corrcoef(draws[:, 0, i], draws[:, 0, j])[0, 1]) < 0.08
        assert abs(np.corrcoef(draws[:, 0, i], draws[:, 1, j])[0, 1]) < 0.08
    # 同一 AP 在相距 40 m 的两点仍相关
    assert np.corrcoef(draws[:, 0, 0], draws[:, 1, 0])[0, 1] == pytest.approx(np.exp(-40.0 / 75.0), abs=0.06)


def test_average_fading_checks_lengths():
    v = [FeatureVector(np.array([1.0, 2.0])), FeatureVector(np.array([3.0, 4.0]))]
    assert np.allclose(average_fading(v, 2).a, [2.0, 3.0])
    with pytest.raises(DataException):
        average_fading(v, 3)
    with pytest.raises(DataException):
        average_fading([v[0], FeatureVector(np.array([1.0]))], 2)


def test_feature_vector_rejects_invalid_values():
    with pytest.raises(DataException):
        FeatureVector(np.array([1.0, 0.0]))
    with pytest.raises(DataException):
        FeatureVector(np.array([1.0, np.nan]))
    with pytest.raises(DataException):
        FeatureVector(np.array([1.0]), label=0)


# 测试数据集构建
def test_build_dataset_without_randomness_is_path_loss(ring, params, rng):
    data = build_dataset(ring, params, None, 200, 1, None, rng)
    radii = np.hypot(data.positions[:, 0], data.positions[:, 1])
    assert np.allclose(data.a_db[:, 0], path_loss_los_db(params, radii))
    assert np.array_equal(data.labels, ring.labels(data.positions))
    assert data.raw_draws == 200


def test_dataset_split_and_concat(rng):
    pts = rng.uniform(0.0, 1.0, (10, 2))
    data = AttenuationDataset(pts, np.arange(1.0, 11.0), np.array([-1, 1] * 5), k_f=3)
    first, second = data.split(0.25, rng)
    assert (len(first), len(second)) == (2, 8)
    assert data.counts() == {"h0": 5, "h1": 5}
    assert len(AttenuationDataset.concat([first, second])) == 10
    assert data.raw_draws == 30
    with pytest.raises(DataException):
        AttenuationDataset(pts, np.ones(9), np.ones(10))
