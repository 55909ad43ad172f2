"""Input validation helpers shared by the estimator, the CLI, and the core ops."""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError, EmptyInputError, UnsupportedChannelCountError

SUPPORTED_CHANNELS = (3, 4)


def check_channels(n: int) -> int:
    if n not in SUPPORTED_CHANNELS:
        raise UnsupportedChannelCountError(
            f"expected 3 (RGB) or 4 (RGBN) channels, got {n}"
        )
    return int(n)


def as_image_array(x, name: str = "image") -> np.ndarray:
    """Coerce to a float64 (height, width, channels) stack and validate it."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 3:
        raise DimensionMismatchError(
            f"{name} must have shape (height, width, channels), got {arr.shape}"
        )
    check_channels(arr.shape[2])
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise EmptyInputError(f"{name} has no pixels: shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains NaN or Inf values")
    if arr.min() < 0.0:
        raise ValueError(f"{name} contains negative intensities")
    return arr


def check_same_grid(a: np.ndarray, b: np.ndarray, what: str = "inputs") -> None:
    if a.shape[:2] != b.shape[:2]:
        raise DimensionMismatchError(
            f"{what} must share the same pixel grid: {a.shape[:2]} vs {b.shape[:2]}"
        )
