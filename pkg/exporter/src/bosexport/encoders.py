"""Sentence encoders behind a minimal batch interface.

The default is a pretrained multilingual sentence-transformer (loaded
lazily, requires the `encoders` extra and network/model availability).
``hash:<dim>`` selects a dependency-free feature-hashing encoder that is
deterministic across runs and platforms; it carries no semantics worth
speaking of but exercises the full export pipeline, which is what the
tests and offline smoke runs need.
"""

from __future__ import annotations

import hashlib
from typing import Protocol

import numpy as np

from .text import tokenize_words

DEFAULT_ENCODER = "paraphrase-multilingual-MiniLM-L12-v2"


class Encoder(Protocol):
    name: str
    dim: int

    def encode(self, texts: list[str]) -> np.ndarray: ...


class HashingEncoder:
    """Signed feature hashing of word tokens, L2-normalized."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError(f"encoder dimension must be >= 1, got {dim}")
        self.dim = dim
        self.name = f"hash:{dim}"

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.zeros((len(texts), self.dim), dtype=np.float32)
        for row, text in enumerate(texts):
            vector = out[row]
            for token in tokenize_words(text):
                digest = hashlib.sha256(token.encode("utf-8")).digest()
                index = int.from_bytes(digest[:8], "little") % self.dim
                sign = 1.0 if digest[8] & 1 else -1.0
                vector[index] += sign
            if not np.any(vector != 0.0):
                vector[0] = 1.0  # keep rows nonzero for empty or cancelled text
            vector /= np.linalg.norm(vector)
        return out


class SentenceTransformerEncoder:
    """Wrapper over sentence-transformers with batched inference."""

    def __init__(self, name: str, batch_size: int = 64):
        from sentence_transformers import SentenceTransformer

        self.name = name
        self.batch_size = batch_size
        self._model = SentenceTransformer(name)
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> np.ndarray:
        vectors = self._model.encode(
            texts,
            batch_size=self.batch_size,
            convert_to_numpy=True,
            show_progress_bar=False,
        )
        return np.ascontiguousarray(vectors, dtype=np.float32)


def get_encoder(name: str, batch_size: int = 64) -> Encoder:
    if name.startswith("hash:"):
        return HashingEncoder(int(name.split(":", 1)[1]))
    return SentenceTransformerEncoder(name, batch_size=batch_size)
