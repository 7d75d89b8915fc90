from typing import Optional, Sequence

from irlv.core.exceptions.base_exception import IrlvException
from irlv.enums.response_codes import ErrorCodeEnum


# === 几何相关异常 ===
class GeometryException(IrlvException):
    def __init__(self, code_enum: ErrorCodeEnum = ErrorCodeEnum.OUTSIDE_AREA, message: str = None,
                 extra: Optional[dict] = None):
        super().__init__(code_enum, message=message, extra=extra)


# === 信道相关异常 ===
class ChannelException(IrlvException):
    def __init__(self, code_enum: ErrorCodeEnum, message: str = None, extra: Optional[dict] = None):
        super().__init__(code_enum, message=message, extra=extra)


# === 数值相关异常 ===
class NumericException(IrlvException):
    def __init__(self, code_enum: ErrorCodeEnum = ErrorCodeEnum.DOMAIN_ERROR, message: str = None,
                 extra: Optional[dict] = None):
        super().__init__(code_enum, message=message, extra=extra)


class TrainingDivergedException(NumericException):
    def __init__(self, loss_trace: Sequence[float], message: str = None):
        trace = [float(v) for v in loss_trace]
        super().__init__(
            ErrorCodeEnum.TRAINING_DIVERGED,
            message=message or f"loss became non-finite after {len(trace)} recorded epochs",
            extra={"loss_trace": trace},
        )
        self.loss_trace = trace
