# irlv/core/exceptions/base_exception.py

from typing import Optional

from irlv.enums.response_codes import ErrorCodeEnum


class IrlvException(Exception):
    def __init__(
            self,
            code_enum: Optional[ErrorCodeEnum] = None,
            message: Optional[str] = None,
            extra: Optional[dict] = None,
    ):
        # 提供一个默认的、安全的备用错误码
        self.code_enum = code_enum or ErrorCodeEnum.UNKNOWN_ERROR
        self.code = self.code_enum.code
        self.exit_code = self.code_enum.exit_code
        self.message = message or self.code_enum.message
        self.extra = extra or {}
        super().__init__(self.message)

    def __str__(self):
        return f"[{self.code}] {self.message}"

    def to_dict(self):
        return {
            "code": self.code,
            "reason": self.code_enum.message,
            "message": self.message,
            "exit_code": self.exit_code,
            "extra": self.extra,
        }


class ConfigException(IrlvException):
    """Run configuration or runtime settings are unusable."""
    def __init__(self, message: str = None, code_enum: ErrorCodeEnum = ErrorCodeEnum.CONFIG_INVALID,
                 extra: Optional[dict] = None):
        super().__init__(code_enum, message=message, extra=extra)


class DataException(IrlvException):
    """Datasets, grids or model files violate their contract."""
    def __init__(self, code_enum: ErrorCodeEnum, message: str = None, extra: Optional[dict] = None):
        super().__init__(code_enum, message=message, extra=extra)
