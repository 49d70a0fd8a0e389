"""Input validation helpers shared by the public functions and estimators."""

from __future__ import annotations

import numbers

import numpy as np


def check_tensor3(x, name: str = "x") -> np.ndarray:
    """Return `x` as a complex128 array of shape (n1, n2, n3).

    Raises
    ------
    ValueError
        If `x` is not 3-way, is empty along some axis, or holds non-finite values.
    """
    arr = np.asarray(x)
    if arr.ndim != 3:
        raise ValueError(f"{name} must be a 3-way array, got ndim={arr.ndim}")
    if 0 in arr.shape:
        raise ValueError(f"{name} has an empty dimension: shape={arr.shape}")
    arr = arr.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf")
    return arr


def check_mask(mask, shape: tuple[int, int, int] | None = None) -> np.ndarray:
    """Return `mask` as a boolean array, checking it is binary and shaped like `shape`."""
    arr = np.asarray(mask)
    if arr.ndim != 3:
        raise ValueError(f"mask must be a 3-way array, got ndim={arr.ndim}")
    if shape is not None and arr.shape != tuple(shape):
        raise ValueError(f"mask shape {arr.shape} does not match {tuple(shape)}")
    if arr.dtype != np.bool_:
        if np.iscomplexobj(arr):
            if np.any(arr.imag != 0):
                raise ValueError("mask must be real-valued 0/1")
            arr = arr.real
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("mask values must be exactly 0 or 1")
        arr = arr.astype(bool)
    return arr


def check_kspace(b, mask) -> tuple[np.ndarray, np.ndarray]:
    """Validate zero-filled k-space data against its sampling mask."""
    b = check_tensor3(b, "b")
    mask = check_mask(mask, b.shape)
    if np.any(b[~mask] != 0):
        raise ValueError("k-space data must be exactly zero outside the mask")
    return b, mask


def check_positive(value, name: str, *, strict: bool = True) -> float:
    if not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not np.isfinite(value) or value < 0 or (strict and value == 0):
        bound = "> 0" if strict else ">= 0"
        raise ValueError(f"{name} must be {bound}, got {value}")
    return value
