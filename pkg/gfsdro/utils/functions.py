from datetime import datetime, timezone

import numpy as np

from gfsdro.utils.errors import DimensionMismatchError


def get_timestamp(pattern: str = "%Y%m%d_%H%M%S") -> str:
    """Get the current timestamp in a format suitable for filenames."""
    return datetime.now(timezone.utc).strftime(pattern)


def as_float_array(value, what: str = "array") -> np.ndarray:
    """Convert to a float64 array, refusing object dtypes."""
    arr = np.asarray(value, dtype=np.float64)
    if arr.ndim == 0:
        raise DimensionMismatchError(what, "at least 1-d", "scalar")
    return arr


def check_last_dim(arr: np.ndarray, d: int, what: str) -> None:
    if arr.shape[-1] != d:
        raise DimensionMismatchError(what, d, arr.shape[-1])


def relative_error(approx: np.ndarray, exact: np.ndarray, floor: float = 1e-8) -> float:
    """Norm-wise relative error with a floor on the denominator."""
    diff = np.linalg.norm(np.ravel(approx) - np.ravel(exact))
    scale = max(np.linalg.norm(approx), np.linalg.norm(exact), floor)
    return float(diff / scale)


def project_l2_ball(theta: np.ndarray, radius: float) -> np.ndarray:
    norm = np.linalg.norm(theta)
    if norm <= radius:
        return theta
    return theta * (radius / norm)
