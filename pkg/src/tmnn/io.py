"""CTN3: a minimal binary container for complex 3-way tensors.

Layout (little-endian)::

    offset  size  field
    0       4     magic b"CTN3"
    4       1     version (u8, currently 1)
    5       24    n1, n2, n3 (three u64)
    29      16*N  N = n1*n2*n3 complex values as (real f64, imag f64) pairs,
                  column-major: n1 varies fastest, then n2, then n3

Masks are stored as tensors whose real parts are 0 or 1.
"""

from __future__ import annotations

import os
import struct

import numpy as np

from ._validation import check_mask, check_tensor3

__all__ = [
    "CorruptHeaderError",
    "MAGIC",
    "TensorFileError",
    "UnsupportedVersionError",
    "VERSION",
    "load_mask",
    "load_tensor",
    "save_mask",
    "save_tensor",
]

MAGIC = b"CTN3"
VERSION = 1
_HEADER = struct.Struct("<4sB3Q")


class TensorFileError(ValueError):
    """A CTN3 file could not be decoded."""


class CorruptHeaderError(TensorFileError):
    """Bad magic, truncated header, or a payload length inconsistent with the dims."""


class UnsupportedVersionError(TensorFileError):
    pass


def save_tensor(path, x) -> None:
    x = check_tensor3(x)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, *x.shape))
        fh.write(np.ravel(x, order="F").astype("<c16", copy=False).tobytes())


def load_tensor(path) -> np.ndarray:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise CorruptHeaderError(f"{os.fspath(path)}: truncated header ({len(raw)} bytes)")
    magic, version, n1, n2, n3 = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise CorruptHeaderError(f"{os.fspath(path)}: bad magic {magic!r}")
    if version != VERSION:
        raise UnsupportedVersionError(f"{os.fspath(path)}: unsupported CTN3 version {version}")
    if 0 in (n1, n2, n3):
        raise CorruptHeaderError(f"{os.fspath(path)}: zero dimension in header {(n1, n2, n3)}")
    expected = n1 * n2 * n3 * 16
    payload = raw[_HEADER.size:]
    if len(payload) != expected:
        raise CorruptHeaderError(
            f"{os.fspath(path)}: header declares {n1}x{n2}x{n3} ({expected} bytes) "
            f"but payload has {len(payload)} bytes"
        )
    data = np.frombuffer(payload, dtype="<c16").astype(np.complex128)
    return data.reshape((n1, n2, n3), order="F")


def save_mask(path, mask) -> None:
    save_tensor(path, check_mask(mask).astype(np.complex128))


def load_mask(path) -> np.ndarray:
    return check_mask(load_tensor(path))
