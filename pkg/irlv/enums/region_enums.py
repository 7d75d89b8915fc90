from enum import Enum, IntEnum


class RegionLabel(IntEnum):
    """
    假设标签: H0 表示 UE 在 ROI 内, H1 表示在 ROI 外。
    数值与训练标签一致, 可以直接参与 numpy 运算。
    """
    H0 = -1
    H1 = 1

    @classmethod
    def from_inside(cls, inside: bool) -> "RegionLabel":
        return cls.H0 if inside else cls.H1


class LosState(str, Enum):
    LOS = "LOS"
    NLOS = "NLOS"


class LosRule(str, Enum):
    """Urban visibility rule between a UE and an AP."""
    SEGMENT = "segment"          # 线段完全落在街道内
    STREET = "street"            # UE 在街道上即为 LOS
    ALWAYS_LOS = "always_los"
    ALWAYS_NLOS = "always_nlos"


class ScenarioKind(str, Enum):
    RING = "ring"
    URBAN = "urban"
    GRID = "grid"
