# irlv/utils/linalg_utils.py

from typing import Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor
from tenacity import retry, retry_if_exception_type, stop_after_attempt

from irlv.core.logger import logger


def jittered_cho_factor(
    matrix: np.ndarray,
    base_jitter: float,
    attempts: int = 3,
    growth: float = 100.0,
) -> Tuple[Tuple[np.ndarray, bool], float]:
    """
    Cholesky factor of ``matrix + jitter * I``.

    The first attempt uses ``base_jitter``; each failed attempt multiplies the
    jitter by ``growth``. Returns the ``cho_factor`` pair and the jitter that
    worked, or re-raises ``LinAlgError`` after the last attempt.
    """
    n = matrix.shape[0]
    jitters = iter(base_jitter * growth ** k for k in range(attempts))
    used = {}

    def _log_retry(retry_state):
        logger.warning(
            f"🔁 Cholesky failed with jitter {used['jitter']:.3e} "
            f"(attempt {retry_state.attempt_number}/{attempts}), escalating"
        )

    @retry(
        stop=stop_after_attempt(attempts),
        retry=retry_if_exception_type(LinAlgError),
        before_sleep=_log_retry,
        reraise=True,
    )
    def _factor():
        used["jitter"] = next(jitters)
        shifted = matrix + used["jitter"] * np.eye(n)
        return cho_factor(shifted, lower=True, check_finite=False)

    factor = _factor()
    return factor, used["jitter"]
