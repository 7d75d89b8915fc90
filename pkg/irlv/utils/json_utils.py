# irlv/utils/json_utils.py
import json
import math
from enum import Enum
from typing import Any

import numpy as np


def to_jsonable(value: Any) -> Any:
    """numpy 值转成 Python 值; NaN 与 ±inf 写成 null"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def canonical_json(data: Any) -> str:
    """Sorted keys, two-space indent, trailing newline; equal data gives equal bytes."""
    return json.dumps(to_jsonable(data), indent=2, sort_keys=True, allow_nan=False) + "\n"
