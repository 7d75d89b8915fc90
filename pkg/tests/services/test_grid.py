import numpy as np
import pandas as pd
import pytest

from irlv.core.exceptions import DataException
from irlv.enums import ErrorCodeEnum
from irlv.services.data import grid_columns, parse_grid
from irlv.services.geometry import default_urban_scenario


@pytest.fixture
def urban2():
    return default_urban_scenario(n_aps=2)


def _lattice_frame(rng, n_side=92, side=540.0, n_aps=2) -> pd.DataFrame:
    centres = (np.arange(n_side) + 0.5) * side / n_side
    xx, yy = np.meshgrid(centres, centres, indexing="ij")
    frame = pd.DataFrame({"x": xx.ravel(), "y": yy.ravel()})
    for n in range(1, n_aps + 1):
        frame[f"ap_{n}"] = rng.normal(90.0, 10.0, frame.shape[0])
    return frame


def _csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False)


# 测试完整网格的解析与划分
def test_full_lattice_parses_and_splits(urban2, rng):
    grid = parse_grid(_csv(_lattice_frame(rng)), urban2)
    assert len(grid) == 8464
    assert grid.complete
    assert grid.spacing == pytest.approx(540.0 / 92)
    assert np.array_equal(grid.labels, urban2.labels(grid.positions))
    assert grid.roi_bounds == urban2.roi.bounds
    train, test = grid.split(5000, rng)
    assert (len(train), len(test)) == (5000, 3464)
    assert np.allclose(10.0 * np.log10(grid.to_dataset().a), grid.a_db)


def test_missing_cells_are_flagged(urban2, rng):
    frame = _lattice_frame(rng, n_side=20).drop(index=[3, 50, 77])
    grid = parse_grid(_csv(frame), urban2)
    assert not grid.complete
    assert int(grid.missing_mask.sum()) == 3


def test_scattered_cells_have_no_spacing(urban2, rng):
    frame = pd.DataFrame(rng.uniform(0.0, 540.0, (300, 2)), columns=["x", "y"])
    frame["ap_1"] = 80.0
    frame["ap_2"] = 85.0
    frame.loc[0, ["x", "y"]] = [100.0, 100.0]
    grid = parse_grid(_csv(frame), urban2)
    assert grid.spacing is None
    assert grid.complete


def test_split_needs_cells_on_both_sides(urban2, rng):
    grid = parse_grid(_csv(_lattice_frame(rng, n_side=10)), urban2)
    with pytest.raises(DataException):
        grid.split(100, rng)


# 测试格式错误
@pytest.mark.parametrize("text,code", [
    ("x,y,ap_1,ap_2\n1,2,3\n", ErrorCodeEnum.RAGGED_ROWS),
    ("x,y,ap_1,ap_2\n100,100,nan,80\n10,10,80,80\n", ErrorCodeEnum.NON_FINITE),
    ("x,y,ap_1,ap_2\n100,100,abc,80\n10,10,80,80\n", ErrorCodeEnum.NON_FINITE),
    ("x,y,ap_1\n100,100,80\n10,10,80\n", ErrorCodeEnum.DIMENSION_MISMATCH),
    ("x,y,ap_1,ap_2\n100,100,80,80\n100,100,81,81\n10,10,80,80\n", ErrorCodeEnum.DIMENSION_MISMATCH),
    ("x,y,ap_1,ap_2\n10,10,80,80\n20,20,80,80\n", ErrorCodeEnum.EMPTY_CLASS),
    ("", ErrorCodeEnum.EMPTY_CLASS),
])
def test_malformed_grids_are_rejected(urban2, text, code):
    with pytest.raises(DataException) as exc:
        parse_grid(text, urban2)
    assert exc.value.code_enum is code


def test_grid_columns():
    assert grid_columns(3) == ["x", "y", "ap_1", "ap_2", "ap_3"]
