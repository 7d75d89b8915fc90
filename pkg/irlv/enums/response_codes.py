from enum import Enum


class ErrorCodeEnum(Enum):
    """
    Error codes shared by every exception of the toolkit.

    Each member carries (code, default message, process exit code); the CLI
    turns the exit code into the status of the process.
    """

    # === 通用 ===
    SUCCESS = (0, "ok", 0)
    UNKNOWN_ERROR = (10000, "unexpected failure", 1)

    # === 配置 ===
    CONFIG_INVALID = (20001, "configuration failed validation", 2)
    CONFIG_NOT_FOUND = (20002, "configuration file not found", 2)
    OUTPUT_EXISTS = (20003, "output exists, pass --force to overwrite", 2)
    UNKNOWN_FIGURE = (20004, "unknown figure bundle", 2)

    # === 数据 ===
    EMPTY_CLASS = (30001, "empty-class", 3)
    RAGGED_ROWS = (30002, "ragged rows in input file", 3)
    NON_FINITE = (30003, "non-finite values in input", 3)
    H1_ROWS_PRESENT = (30004, "h1-rows-present", 3)
    DIMENSION_MISMATCH = (30005, "dimension mismatch", 3)
    DATA_NOT_FOUND = (30006, "input data not found", 3)
    BAD_MODEL_FILE = (30007, "malformed model file", 3)
    BAD_MANIFEST = (30008, "malformed manifest", 3)

    # === 几何 ===
    OUTSIDE_AREA = (31001, "outside-area", 3)
    INVALID_LAYOUT = (31002, "invalid scenario layout", 2)

    # === 信道 ===
    NON_POSITIVE_DISTANCE = (32001, "non-positive-distance", 4)
    COVARIANCE_NOT_PSD = (32002, "covariance-not-psd", 4)
    POSITION_NOT_IN_MAP = (32003, "position-not-in-map", 4)

    # === 数值 ===
    DOMAIN_ERROR = (40001, "argument outside the function domain", 4)
    BOTH_DENSITIES_ZERO = (40002, "both-densities-zero", 4)
    DEGENERATE_SHADOWING = (40003, "degenerate-shadowing", 4)
    SINGULAR_SYSTEM = (40004, "singular linear system", 4)
    NOT_CONVERGED = (40005, "optimizer did not converge", 4)
    TRAINING_DIVERGED = (40006, "training loss became non-finite", 4)
    ALL_MAPS_SKIPPED = (40007, "every shadowing map failed", 4)

    def __init__(self, code: int, message: str, exit_code: int):
        self._code = code
        self._message = message
        self._exit_code = exit_code

    @property
    def code(self):
        return self._code

    @property
    def message(self):
        return self._message

    @property
    def exit_code(self):
        return self._exit_code
