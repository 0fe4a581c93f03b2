"""Per-group embedding vectors with bit-exact binary I/O.

One float32 row per sentence group, in global_index order. The on-disk
layout is fixed (little-endian, versioned header) so files written by any
exporter round-trip bitwise. Matrices are immutable after load; reads are
thread-safe.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, ValidationError

MAGIC = b"BOSE"
FORMAT_VERSION = 1

# magic, version u32, n_rows u64, dim u32 -- all little-endian, no padding
_HEADER = struct.Struct("<4sIQI")


@dataclass
class EmbeddingMatrix:
    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.ascontiguousarray(self.rows, dtype=np.float32)
        if rows.ndim != 2:
            raise ValidationError(f"embeddings must be 2-D, got shape {rows.shape}")
        self.rows = rows

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]


def write_embeddings(matrix: EmbeddingMatrix, path) -> None:
    rows = matrix.rows
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, rows.shape[0], rows.shape[1]))
        fh.write(rows.astype("<f4", copy=False).tobytes(order="C"))


def read_embeddings(path) -> EmbeddingMatrix:
    """Read and validate a binary embedding file.

    Rejects bad magic/version, payload size mismatches, non-finite
    entries, and all-zero rows (these would poison cosine argmax later).
    """
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        if len(header) < _HEADER.size:
            raise FormatError("file too short for header")
        magic, version, n_rows, dim = _HEADER.unpack(header)
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
        if version != FORMAT_VERSION:
            raise FormatError(f"unsupported format version {version}")
        if dim == 0:
            raise FormatError("dimension must be positive")
        payload = fh.read()
    expected = n_rows * dim * 4
    if len(payload) != expected:
        raise FormatError(
            f"truncated payload: expected {expected} bytes for "
            f"{n_rows}x{dim} float32, found {len(payload)}"
        )
    rows = np.frombuffer(payload, dtype="<f4").reshape(n_rows, dim)
    rows = np.ascontiguousarray(rows, dtype=np.float32)
    if not np.all(np.isfinite(rows)):
        raise ValidationError("embeddings contain NaN or Inf")
    zero = np.flatnonzero(~np.any(rows != 0.0, axis=1))
    if zero.size:
        raise ValidationError(f"row {int(zero[0])} is all zeros")
    return EmbeddingMatrix(rows)


def cosine(a, b) -> float:
    """Cosine similarity, computed symmetrically and clamped to [-1, 1]."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValidationError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValidationError("cosine is undefined for zero vectors")
    if np.array_equal(a, b):
        return 1.0  # exact identity, not 1 - epsilon from norm rounding
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def unit_normalize(matrix: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit L2 norm (new matrix, float32).

    After this, cosine between rows reduces to a plain dot product, which
    is what the assignment loop computes.
    """
    rows = matrix.rows
    norms = np.linalg.norm(rows.astype(np.float64), axis=1)
    zero = np.flatnonzero(norms == 0.0)
    if zero.size:
        raise ValidationError(f"row {int(zero[0])} is all zeros")
    return EmbeddingMatrix((rows / norms[:, None]).astype(np.float32))
