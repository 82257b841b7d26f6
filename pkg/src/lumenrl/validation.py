"""Input validation helpers shared across the package.

Images are float arrays of shape (H, W, 3) with values in [0, 1];
planes are float arrays of shape (H, W). Validators return the input
as a float64 C-contiguous array so downstream code can rely on dtype
and layout.
"""

from __future__ import annotations

import numpy as np

MIN_DIM = 8


def check_plane(plane, min_dim: int = MIN_DIM, name: str = "plane") -> np.ndarray:
    arr = np.asarray(plane, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < min_dim or arr.shape[1] < min_dim:
        raise ValueError(
            f"{name} dimensions must be at least {min_dim}x{min_dim}, got {arr.shape}"
        )
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    return np.ascontiguousarray(arr)


def check_image(image, min_dim: int = MIN_DIM, name: str = "image") -> np.ndarray:
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"{name} must have shape (H, W, 3), got {arr.shape}")
    if arr.shape[0] < min_dim or arr.shape[1] < min_dim:
        raise ValueError(
            f"{name} dimensions must be at least {min_dim}x{min_dim}, got {arr.shape[:2]}"
        )
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    if arr.min() < 0.0 or arr.max() > 1.0:
        raise ValueError(f"{name} values must lie in [0, 1]")
    return np.ascontiguousarray(arr)


def check_gains(gains, shape, name: str = "gains") -> np.ndarray:
    arr = np.asarray(gains, dtype=np.float64)
    if arr.shape != tuple(shape):
        raise ValueError(f"{name} shape {arr.shape} does not match {tuple(shape)}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite values")
    if (arr <= 0.0).any():
        raise ValueError(f"{name} must be strictly positive")
    return arr


def readonly(arr: np.ndarray) -> np.ndarray:
    """Return `arr` flagged read-only (no copy)."""
    arr.setflags(write=False)
    return arr
