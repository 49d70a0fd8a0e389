"""Cartesian Fourier sampling: centered unitary FFTs, masks, forward model, noise.

k-space frames are *centered*: the DC sample sits at index ``(n1 // 2, n2 // 2)``
(``fftshift`` convention).  Masks use the same grid, so a mask and the output of
:func:`fft2_per_frame` can be multiplied directly.
"""

from __future__ import annotations

import math

import numpy as np

from ._validation import check_kspace, check_mask, check_tensor3

__all__ = [
    "add_noise",
    "apply_A",
    "apply_A_star",
    "fft2_per_frame",
    "ifft2_per_frame",
    "pseudo_radial_mask",
    "undersampling_ratio",
    "variable_density_mask",
]

_AXES = (0, 1)


def _fft2(x: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(
        np.fft.fft2(np.fft.ifftshift(x, axes=_AXES), axes=_AXES, norm="ortho"), axes=_AXES
    )


def _ifft2(k: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(
        np.fft.ifft2(np.fft.ifftshift(k, axes=_AXES), axes=_AXES, norm="ortho"), axes=_AXES
    )


def fft2_per_frame(x) -> np.ndarray:
    """Unitary, centered 2-D DFT of every frame."""
    return _fft2(check_tensor3(x))


def ifft2_per_frame(k) -> np.ndarray:
    """Inverse (and adjoint) of :func:`fft2_per_frame`."""
    return _ifft2(check_tensor3(k))


def apply_A(x, mask) -> np.ndarray:
    """Sampled k-space ``S F x``, zero-filled outside the mask."""
    x = check_tensor3(x)
    mask = check_mask(mask, x.shape)
    return np.where(mask, fft2_per_frame(x), 0)


def apply_A_star(b, mask) -> np.ndarray:
    """Adjoint ``F^* S b``; with ``b = apply_A(x)`` this is the zero-filled recon."""
    b = check_tensor3(b, "b")
    mask = check_mask(mask, b.shape)
    return ifft2_per_frame(np.where(mask, b, 0))


def undersampling_ratio(mask) -> float:
    mask = check_mask(mask)
    return float(np.count_nonzero(mask)) / mask.size


def _raster_line(n1: int, n2: int, theta: float) -> tuple[np.ndarray, np.ndarray]:
    # DDA through the centre: one sample per step along the dominant axis,
    # theta measured from the row direction (theta=0 is the central row)
    c1, c2 = n1 // 2, n2 // 2
    d1, d2 = math.sin(theta), math.cos(theta)
    if abs(d2) >= abs(d1):
        cols = np.arange(n2)
        rows = np.rint(c1 + (cols - c2) * d1 / d2).astype(int)
    else:
        rows = np.arange(n1)
        cols = np.rint(c2 + (rows - c1) * d2 / d1).astype(int)
    keep = (rows >= 0) & (rows < n1) & (cols >= 0) & (cols < n2)
    return rows[keep], cols[keep]


def pseudo_radial_mask(n1: int, n2: int, n3: int, lines: int, seed=None,
                       *, vary_frames: bool = True) -> np.ndarray:
    """Rasterized radial spokes on the Cartesian grid.

    Frame ``t`` uses angles ``j * pi / lines + t * pi / (lines * n3)`` for
    ``j = 0 .. lines - 1``, so successive frames interleave their spokes.
    With ``vary_frames=False`` every frame uses the frame-0 angles.  `seed`
    is accepted for interface symmetry; the pattern is deterministic.
    """
    if int(lines) != lines or lines < 1:
        raise ValueError(f"lines must be a positive integer, got {lines}")
    lines = int(lines)
    mask = np.zeros((n1, n2, n3), dtype=bool)
    for t in range(n3):
        offset = t * math.pi / (lines * n3) if vary_frames else 0.0
        for j in range(lines):
            r, c = _raster_line(n1, n2, j * math.pi / lines + offset)
            mask[r, c, t] = True
    return mask


#: side of the always-sampled square around DC
VD_CENTER = 8
#: exponent of the polynomial radial density (1 - r / r_max) ** p
VD_POWER = 4


def _vd_density(n1: int, n2: int) -> np.ndarray:
    r1 = np.arange(n1) - n1 // 2
    r2 = np.arange(n2) - n2 // 2
    rad = np.hypot(r1[:, None], r2[None, :])
    # +1 keeps the far corners at small positive probability
    return (1.0 - rad / (rad.max() + 1.0)) ** VD_POWER


def _center_block(n1: int, n2: int) -> np.ndarray:
    block = np.zeros((n1, n2), dtype=bool)
    h1, h2 = min(VD_CENTER, n1), min(VD_CENTER, n2)
    s1, s2 = n1 // 2 - h1 // 2, n2 // 2 - h2 // 2
    block[s1:s1 + h1, s2:s2 + h2] = True
    return block


def variable_density_mask(n1: int, n2: int, n3: int, ratio: float, seed=None,
                          *, vary_frames: bool = True) -> np.ndarray:
    """Variable-density random mask with exactly ``round(ratio * n1 * n2)`` samples per frame.

    The central ``8 x 8`` block is always sampled; the remaining samples are
    drawn without replacement with probability proportional to
    ``(1 - r / r_max) ** 4`` of the distance ``r`` to DC.
    """
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must lie in (0, 1), got {ratio}")
    per_frame = int(round(ratio * n1 * n2))
    center = _center_block(n1, n2)
    n_center = int(center.sum())
    if per_frame < n_center:
        raise ValueError(
            f"ratio {ratio} gives {per_frame} samples per frame, fewer than the "
            f"{n_center} of the fully sampled centre"
        )
    rng = np.random.default_rng(seed)
    pdf = _vd_density(n1, n2)[~center]
    pdf = pdf / pdf.sum()
    free = np.flatnonzero(~center.ravel())
    mask = np.zeros((n1, n2, n3), dtype=bool)
    frame = None
    for t in range(n3):
        if frame is None or vary_frames:
            picks = rng.choice(free, size=per_frame - n_center, replace=False, p=pdf)
            frame = center.copy().ravel()
            frame[picks] = True
            frame = frame.reshape(n1, n2)
        mask[:, :, t] = frame
    return mask


def add_noise(b, mask, snr_db: float, seed=None) -> np.ndarray:
    """Add circular complex white Gaussian noise on the sampled entries of `b`.

    The per-sample variance is chosen so that ``20 log10(||b|| / ||noise||)``
    equals `snr_db` in expectation (the norm is taken over sampled entries).
    ``snr_db = inf`` returns an unchanged copy.
    """
    b, mask = check_kspace(b, mask)
    if math.isinf(snr_db) and snr_db > 0:
        return b.copy()
    m = int(np.count_nonzero(mask))
    if m == 0:
        raise ValueError("no sampled entries to add noise to")
    sigma = np.linalg.norm(b) / math.sqrt(m) * 10.0 ** (-snr_db / 20.0)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal((m, 2)) @ np.array([1.0, 1j]) * (sigma / math.sqrt(2.0))
    out = b.copy()
    out[mask] += noise
    return out
