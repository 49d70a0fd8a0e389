"""Reconstruction quality metrics."""

from __future__ import annotations

import numpy as np

__all__ = ["display_scale", "error_image", "nmse", "snr_db"]


def _pair(reference, estimate):
    reference = np.asarray(reference)
    estimate = np.asarray(estimate)
    if reference.shape != estimate.shape:
        raise ValueError(f"shape mismatch: {reference.shape} vs {estimate.shape}")
    return reference, estimate


def snr_db(reference, estimate) -> float:
    """Reconstruction SNR, ``20 log10(||ref|| / ||est - ref||)`` over the whole volume.

    Returns ``inf`` for an exact reconstruction.
    """
    reference, estimate = _pair(reference, estimate)
    ref_norm = np.linalg.norm(reference)
    if ref_norm == 0:
        raise ValueError("reference is identically zero")
    err = np.linalg.norm(estimate - reference)
    if err == 0:
        return float("inf")
    return float(20.0 * np.log10(ref_norm / err))


def nmse(reference, estimate) -> float:
    reference, estimate = _pair(reference, estimate)
    ref_norm2 = np.vdot(reference, reference).real
    if ref_norm2 == 0:
        raise ValueError("reference is identically zero")
    diff = estimate - reference
    return float(np.vdot(diff, diff).real / ref_norm2)


def error_image(reference, estimate, frame: int) -> np.ndarray:
    """Magnitude of the error in one frame."""
    reference, estimate = _pair(reference, estimate)
    n3 = reference.shape[2]
    if not 0 <= frame < n3:
        raise IndexError(f"frame {frame} out of range [0, {n3})")
    return np.abs(estimate[:, :, frame] - reference[:, :, frame])


def display_scale(reference, *estimates, frame: int) -> float:
    """Common gray-level scale for the error images of several methods on one frame."""
    return max((float(error_image(reference, e, frame).max()) for e in estimates), default=0.0)
