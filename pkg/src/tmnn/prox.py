r"""Proximal maps of the matrix nuclear norm (SVT) and tensor nuclear norm (TSVT)."""

from __future__ import annotations

import numpy as np

from ._validation import check_positive, check_tensor3
from .tensor import _batched_svd, _dft3, _idft3, _slices_first, _slices_last

__all__ = ["svt", "tsvt", "RELATIVE_ZERO"]

#: singular values below this fraction of the largest are zeroed before shrinkage
RELATIVE_ZERO = 1e-14


def _shrink(sig: np.ndarray, tau) -> np.ndarray:
    smax = sig.max(axis=-1, keepdims=True) if sig.size else 0.0
    sig = np.where(sig < RELATIVE_ZERO * smax, 0.0, sig)
    return np.maximum(sig - tau, 0.0)


def svt(y, tau: float) -> np.ndarray:
    r"""Singular value thresholding.

    Solves :math:`\min_M \tau\|M\|_* + \frac12\|M - Y\|_F^2`.

    Parameters
    ----------
    y : array_like
      Complex matrix :math:`Y`
    tau : float
      Threshold :math:`\tau \geq 0`; zero returns ``y`` unchanged

    Returns
    -------
    M : ndarray
      :math:`U \mathrm{diag}(\max(\sigma - \tau, 0)) V^H`
    """
    tau = check_positive(tau, "tau", strict=False)
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 2:
        raise ValueError(f"svt expects a matrix, got ndim={y.ndim}")
    return _svt(y, tau)


def _svt(y: np.ndarray, tau: float) -> np.ndarray:
    if tau == 0:
        return y.copy()
    u, sig, vh = _batched_svd(y)
    return (u * _shrink(sig, tau)) @ vh


def tsvt(y, tau: float) -> np.ndarray:
    r"""Tensor singular value thresholding, the prox of ``tau * tnn``.

    Each slice of the unitary temporal DFT is soft-thresholded at
    :math:`\tau/\sqrt{n_3}`.  That threshold follows from
    :math:`\mathrm{tnn}(Z) = n_3^{-1/2}\sum_i\|\tilde Z_i\|_*` and Parseval,
    which make the problem separable over the spectral slices.
    """
    tau = check_positive(tau, "tau", strict=False)
    return _tsvt(check_tensor3(y, "y"), tau)


def _tsvt(y: np.ndarray, tau: float) -> np.ndarray:
    if tau == 0:
        return y.copy()
    n3 = y.shape[2]
    u, sig, vh = _batched_svd(_slices_first(_dft3(y)))
    shrunk = _shrink(sig, tau / np.sqrt(n3))
    zf = (u * shrunk[:, None, :]) @ vh
    return _idft3(_slices_last(zf))
