import sys
from typing import Optional, Sequence

from irlv.api.router import api_router
from irlv.config.settings import settings
from irlv.core.exceptions import IrlvException
from irlv.core.logger import configure_file_logging, logger
from irlv.enums.response_codes import ErrorCodeEnum


def irlv_exception_handler(exc: IrlvException) -> int:
    """业务异常: 记录错误码并返回对应的进程退出码 (2 配置, 3 数据, 4 数值)"""
    logger.error(f"❌ {exc}")
    for key, value in exc.extra.items():
        logger.error(f"   {key}: {value}")
    return exc.exit_code


def global_exception_handler(exc: Exception) -> int:
    logger.opt(exception=exc).error(f"Unhandled Exception | {exc!r}")
    return ErrorCodeEnum.UNKNOWN_ERROR.exit_code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = api_router.build_parser(
        prog="irlv",
        description="In-region location verification: simulate attenuation data, train verifiers, sweep ROC curves.",
    )
    args = parser.parse_args(argv)
    configure_file_logging(**settings.logging.model_dump())
    logger.debug(f"🚀 irlv {args.command}")
    try:
        api_router.dispatch(args)
    except IrlvException as exc:
        return irlv_exception_handler(exc)
    except Exception as exc:
        return global_exception_handler(exc)
    return ErrorCodeEnum.SUCCESS.exit_code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
