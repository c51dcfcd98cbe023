"""Input validation helpers."""

from __future__ import annotations

import numpy as np


def check_binary_series(y, *, min_len: int = 0, name: str = "series") -> np.ndarray:
    """Coerce ``y`` to a 1-d uint8 array of 0/1 values.

    Accepts anything array-like plus objects exposing a ``values`` attribute
    (e.g. an ingested series).
    """
    values = getattr(y, "values", y)
    arr = np.asarray(values)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_len:
        raise ValueError(f"{name} needs at least {min_len} observations, got {arr.size}")
    if arr.size and not ((arr == 0) | (arr == 1)).all():
        raise ValueError(f"{name} must contain only 0/1 values")
    return arr.astype(np.uint8, copy=False)


def check_unit_interval(value: float, name: str, *, closed_right: bool = True) -> float:
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite")
    top_ok = value <= 1.0 if closed_right else value < 1.0
    if not (0.0 <= value and top_ok):
        bracket = "[0, 1]" if closed_right else "[0, 1)"
        raise ValueError(f"{name} must lie in {bracket}, got {value}")
    return value


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not (np.isfinite(value) and value > 0.0):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value
