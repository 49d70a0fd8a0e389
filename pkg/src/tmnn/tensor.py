r"""Third-order complex tensors, the t-product, t-SVD and tensor nuclear norm.

A tensor is a plain ``numpy`` array of shape ``(n1, n2, n3)``; ``x[:, :, t]``
is frontal slice ``t`` (one time frame of a dynamic image).  Wherever a frame
is vectorized (Casorati unfolding, file storage) the order is column-major
within the frame, i.e. ``x.reshape(n1 * n2, n3, order="F")``.

All DFTs are unitary.  The tensor nuclear norm is defined through the block
circulant matrix,

.. math::
   \|\mathcal{X}\|_* = \frac{1}{n_3} \|\mathrm{bcirc}(\mathcal{X})\|_*
                     = \frac{1}{\sqrt{n_3}} \sum_i \|\tilde{X}_i\|_*

where :math:`\tilde{X}_i` are the frontal slices of the *unitary* temporal
DFT of :math:`\mathcal{X}`; the unnormalized DFT blocks are :math:`\sqrt{n_3}`
times larger.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ._validation import check_tensor3

__all__ = [
    "TSvdFactors",
    "TensorSVDError",
    "bcirc",
    "bdiag_spectral",
    "casorati_nn",
    "dft3",
    "frontal_slice",
    "idft3",
    "identity_tensor",
    "mode3_fold",
    "mode3_unfold",
    "nuclear_norm",
    "t_product",
    "t_svd",
    "t_transpose",
    "tnn",
]


class TensorSVDError(np.linalg.LinAlgError):
    """SVD of a spectral slice failed to converge."""


class TSvdFactors(NamedTuple):
    """Economy t-SVD factors with ``x = u * s * t_transpose(v)``.

    ``u`` is n1 x k x n3, ``s`` is k x k x n3 and f-diagonal, ``v`` is
    n2 x k x n3, with ``k = min(n1, n2)``.  The nonnegative, nonincreasing
    singular values live in the temporal DFT domain: ``sigma[i]`` is the
    diagonal of slice ``i`` of ``dft3(s)``.
    """

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray
    sigma: np.ndarray


def frontal_slice(x, i: int) -> np.ndarray:
    """Return frontal slice ``i`` (0-based) as an n1 x n2 matrix."""
    x = np.asarray(x)
    if not -x.shape[2] <= i < x.shape[2]:
        raise IndexError(f"slice {i} out of range for n3={x.shape[2]}")
    return x[:, :, i]


def _dft3(x: np.ndarray) -> np.ndarray:
    return np.fft.fft(x, axis=2, norm="ortho")


def _idft3(x: np.ndarray) -> np.ndarray:
    return np.fft.ifft(x, axis=2, norm="ortho")


def dft3(x) -> np.ndarray:
    """Unitary DFT of every tube ``x[i, j, :]``."""
    return _dft3(check_tensor3(x))


def idft3(x) -> np.ndarray:
    return _idft3(check_tensor3(x))


def mode3_unfold(x) -> np.ndarray:
    """Casorati matrix: column ``t`` is frame ``t`` vectorized column-major."""
    x = np.asarray(x)
    n1, n2, n3 = x.shape
    return x.reshape(n1 * n2, n3, order="F")


def mode3_fold(m, shape) -> np.ndarray:
    """Inverse of :func:`mode3_unfold` (and its adjoint)."""
    m = np.asarray(m)
    n1, n2, n3 = shape
    if m.shape != (n1 * n2, n3):
        raise ValueError(f"matrix shape {m.shape} inconsistent with tensor shape {tuple(shape)}")
    return m.reshape(n1, n2, n3, order="F")


def bcirc(x) -> np.ndarray:
    """Explicit block circulant matrix, block (r, c) = slice ``(r - c) mod n3``."""
    x = np.asarray(x)
    n1, n2, n3 = x.shape
    out = np.empty((n1 * n3, n2 * n3), dtype=np.result_type(x, np.complex128))
    for r in range(n3):
        for c in range(n3):
            out[r * n1:(r + 1) * n1, c * n2:(c + 1) * n2] = x[:, :, (r - c) % n3]
    return out


def bdiag_spectral(x) -> list[np.ndarray]:
    """Diagonal blocks of the block-diagonalized tensor (slices of ``dft3(x)``)."""
    xf = dft3(x)
    return [xf[:, :, i] for i in range(xf.shape[2])]


def _slices_first(x: np.ndarray) -> np.ndarray:
    return np.moveaxis(x, 2, 0)


def _slices_last(x: np.ndarray) -> np.ndarray:
    return np.moveaxis(x, 0, 2)


def identity_tensor(n: int, n3: int) -> np.ndarray:
    """Identity for the t-product: I_n on the first slice, zeros elsewhere."""
    e = np.zeros((n, n, n3), dtype=np.complex128)
    e[:, :, 0] = np.eye(n)
    return e


def t_transpose(x) -> np.ndarray:
    """Tensor conjugate transpose: transpose each slice, reverse slices 2..n3."""
    x = np.asarray(x)
    xt = np.conj(np.transpose(x, (1, 0, 2)))
    return np.concatenate([xt[:, :, :1], xt[:, :, :0:-1]], axis=2)


def t_product(a, b) -> np.ndarray:
    """Tensor-tensor product ``a * b``, equal to ``bcirc(a) @ [b_1; ...; b_n3]``."""
    a = check_tensor3(a, "a")
    b = check_tensor3(b, "b")
    if a.shape[2] != b.shape[2]:
        raise ValueError(f"n3 mismatch: {a.shape[2]} vs {b.shape[2]}")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"inner dimension mismatch: {a.shape} * {b.shape}")
    n3 = a.shape[2]
    # unitary slices multiply to 1/sqrt(n3) of the product's spectrum
    cf = np.sqrt(n3) * (_slices_first(dft3(a)) @ _slices_first(dft3(b)))
    return idft3(_slices_last(cf))


def _batched_svd(slices: np.ndarray, compute_uv: bool = True):
    try:
        return np.linalg.svd(slices, full_matrices=False, compute_uv=compute_uv)
    except np.linalg.LinAlgError:
        for i, blk in enumerate(slices):
            try:
                np.linalg.svd(blk, compute_uv=False)
            except np.linalg.LinAlgError as exc:
                raise TensorSVDError(f"SVD did not converge on spectral slice {i}") from exc
        raise


def t_svd(x) -> TSvdFactors:
    """Economy t-SVD computed slice-wise in the temporal Fourier domain."""
    x = check_tensor3(x)
    n3 = x.shape[2]
    u, sig, vh = _batched_svd(_slices_first(dft3(x)))
    k = sig.shape[1]
    s_f = np.zeros((n3, k, k), dtype=np.complex128)
    idx = np.arange(k)
    s_f[:, idx, idx] = sig
    # t-orthogonality u^T * u = I forces spectral u (and v) scaled by 1/sqrt(n3)
    u_t = idft3(_slices_last(u / np.sqrt(n3)))
    v_t = idft3(_slices_last(np.conj(np.swapaxes(vh, 1, 2)) / np.sqrt(n3)))
    s_t = idft3(_slices_last(s_f))
    return TSvdFactors(u=u_t, s=s_t, v=v_t, sigma=sig)


def nuclear_norm(m) -> float:
    """Sum of singular values of a matrix."""
    return float(np.sum(np.linalg.svd(np.asarray(m), compute_uv=False)))


def _tnn(x: np.ndarray) -> float:
    sig = _batched_svd(_slices_first(_dft3(x)), compute_uv=False)
    return float(np.sum(sig) / np.sqrt(x.shape[2]))


def tnn(x) -> float:
    r"""Tensor nuclear norm, :math:`\frac{1}{n_3}\|\mathrm{bcirc}(x)\|_*`."""
    return _tnn(check_tensor3(x))


def _casorati_nn(x: np.ndarray) -> float:
    return float(np.sum(_batched_svd(mode3_unfold(x), compute_uv=False)))


def casorati_nn(x) -> float:
    """Nuclear norm of the Casorati (mode-3) unfolding."""
    return _casorati_nn(check_tensor3(x))
