# irlv/services/learning/model_io.py
"""
Flat text format shared by every trained model.

    irlv-model 1
    meta <key> <value...>
    array <name> <dim...>
    <row-major values, 17 significant digits>

Lines are LF terminated; blank lines and lines starting with ``#`` are ignored.
"""
from typing import Dict, List, Tuple

import numpy as np

from irlv.core.exceptions import DataException
from irlv.enums import ErrorCodeEnum

MAGIC = "irlv-model"
VERSION = 1


def _format(values: np.ndarray) -> str:
    flat = np.asarray(values, dtype=float).reshape(-1)
    return " ".join(f"{v:.17g}" for v in flat)


def dump_model_text(meta: Dict[str, object], arrays: Dict[str, np.ndarray]) -> str:
    lines: List[str] = [f"{MAGIC} {VERSION}"]
    for key, value in meta.items():
        if isinstance(value, (list, tuple)):
            value = " ".join(str(v) for v in value)
        lines.append(f"meta {key} {value}")
    for name, arr in arrays.items():
        arr = np.asarray(arr, dtype=float)
        dims = " ".join(str(d) for d in arr.shape)
        lines.append(f"array {name} {dims}".rstrip())
        lines.append(_format(arr))
    return "\n".join(lines) + "\n"


def _bad(message: str) -> DataException:
    return DataException(ErrorCodeEnum.BAD_MODEL_FILE, message)


def parse_model_text(text: str) -> Tuple[Dict[str, str], Dict[str, np.ndarray]]:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0].split() != [MAGIC, str(VERSION)]:
        raise _bad(f"missing '{MAGIC} {VERSION}' header")

    meta: Dict[str, str] = {}
    arrays: Dict[str, np.ndarray] = {}
    i = 1
    while i < len(lines):
        parts = lines[i].split()
        if parts[0] == "meta" and len(parts) >= 2:
            meta[parts[1]] = " ".join(parts[2:])
            i += 1
        elif parts[0] == "array" and len(parts) >= 2:
            name = parts[1]
            try:
                shape = tuple(int(d) for d in parts[2:])
            except ValueError as e:
                raise _bad(f"array '{name}' has a non-integer shape") from e
            size = int(np.prod(shape)) if shape else 1
            if size == 0:
                arrays[name] = np.zeros(shape)
                i += 1
                continue
            if i + 1 >= len(lines):
                raise _bad(f"array '{name}' has no values")
            try:
                values = np.array(lines[i + 1].split(), dtype=float)
            except ValueError as e:
                raise _bad(f"array '{name}' holds non-numeric values") from e
            if values.size != size:
                raise _bad(f"array '{name}' expects {size} values, found {values.size}")
            if not np.all(np.isfinite(values)):
                raise _bad(f"array '{name}' holds non-finite values")
            arrays[name] = values.reshape(shape)
            i += 2
        else:
            raise _bad(f"unexpected line {lines[i][:40]!r}")
    return meta, arrays


def require(meta: Dict[str, str], arrays: Dict[str, np.ndarray], keys=(), names=()) -> None:
    missing = [k for k in keys if k not in meta] + [n for n in names if n not in arrays]
    if missing:
        raise _bad(f"model file lacks {missing}")
