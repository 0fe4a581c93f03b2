"""Writer (and validating reader) for the engine's binary embedding file.

Layout: magic "BOSE", version u32 = 1, row count u64, dim u32, all
little-endian, then float32 values row-major. Row order must match the
corpus file's global group order.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"BOSE"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sIQI")


class BoseFormatError(Exception):
    pass


def write_matrix(rows: np.ndarray, path) -> None:
    rows = np.ascontiguousarray(rows, dtype=np.float32)
    if rows.ndim != 2:
        raise BoseFormatError(f"expected a 2-D matrix, got shape {rows.shape}")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, rows.shape[0], rows.shape[1]))
        fh.write(rows.astype("<f4", copy=False).tobytes(order="C"))


def read_matrix(path) -> np.ndarray:
    """Read and validate; used by ``verify`` to re-check written output."""
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise BoseFormatError("file too short for header")
        magic, version, n_rows, dim = _HEADER.unpack(header)
        if magic != MAGIC:
            raise BoseFormatError(f"bad magic {magic!r}")
        if version != FORMAT_VERSION:
            raise BoseFormatError(f"unsupported version {version}")
        if dim == 0:
            raise BoseFormatError("dimension must be positive")
        payload = fh.read()
    expected = n_rows * dim * 4
    if len(payload) != expected:
        raise BoseFormatError(
            f"truncated payload: expected {expected} bytes, found {len(payload)}"
        )
    rows = np.frombuffer(payload, dtype="<f4").reshape(n_rows, dim)
    if not np.all(np.isfinite(rows)):
        raise BoseFormatError("matrix contains NaN or Inf")
    zero = np.flatnonzero(~np.any(rows != 0.0, axis=1))
    if zero.size:
        raise BoseFormatError(f"row {int(zero[0])} is all zeros")
    return np.ascontiguousarray(rows)
