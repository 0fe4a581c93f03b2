"""Synthetic corpora with planted topic structure.

Used by the acceptance suite and for quick experiments: k orthonormal
topic directions, documents drawing group topics from a per-document
mixture, group vectors perturbed by Gaussian noise, and token text where
each group carries its topic's planted word among shared fillers. The
planted per-group topics are the recovery oracle.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Corpus, build_corpus, save_corpus
from .embeddings import EmbeddingMatrix, write_embeddings
from .errors import InvalidConfigError

FILLER_WORDS = (
    "the", "and", "of", "with", "from", "into", "about",
    "data", "note", "text", "item", "other", "some", "this",
)

CORPUS_SUFFIX = ".corpus.jsonl"
EMBEDDINGS_SUFFIX = ".embeddings.bose"
TRUTH_SUFFIX = ".truth.jsonl"

# Dirichlet concentration of per-document topic mixtures. Below 1 so
# documents lean on a few topics each, as real corpora do.
MIXTURE_CONCENTRATION = 0.3


@dataclass
class SyntheticData:
    corpus: Corpus
    embeddings: EmbeddingMatrix
    group_topics: list[np.ndarray]  # planted topic per group, per document

    def flat_truth(self) -> np.ndarray:
        return np.concatenate(self.group_topics)


def planted_word(topic: int) -> str:
    return f"planted{topic}"


def generate(
    k: int,
    docs: int,
    groups_per_doc: int,
    dim: int,
    noise: float,
    seed: int = 0,
) -> SyntheticData:
    if k < 1 or docs < 1 or groups_per_doc < 1 or dim < 1:
        raise InvalidConfigError("k, docs, groups-per-doc and dim must be >= 1")
    if k > dim:
        raise InvalidConfigError(
            f"k={k} topics need k orthonormal directions but dim={dim}"
        )
    if noise < 0:
        raise InvalidConfigError(f"noise must be >= 0, got {noise}")

    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    directions = np.eye(k, dim, dtype=np.float64)

    entries = []
    vectors = np.empty((docs * groups_per_doc, dim), dtype=np.float32)
    group_topics: list[np.ndarray] = []
    row = 0
    for d in range(docs):
        mixture = rng.dirichlet(np.full(k, MIXTURE_CONCENTRATION))
        topics = rng.choice(k, size=groups_per_doc, p=mixture)
        group_topics.append(topics.astype(np.int64))
        groups = []
        for t in topics:
            vec = directions[t].copy()
            if noise > 0:
                vec = vec + noise * rng.standard_normal(dim)
            vec /= np.linalg.norm(vec)
            vectors[row] = vec.astype(np.float32)
            row += 1
            fillers = rng.choice(len(FILLER_WORDS), size=4)
            groups.append(
                [
                    [planted_word(int(t)), FILLER_WORDS[fillers[0]], FILLER_WORDS[fillers[1]]],
                    [FILLER_WORDS[fillers[2]], planted_word(int(t)), FILLER_WORDS[fillers[3]]],
                ]
            )
        dominant = int(np.argmax(np.bincount(topics, minlength=k)))
        entries.append((f"doc{d:05d}", f"class{dominant}", groups))

    corpus = build_corpus(entries)
    return SyntheticData(corpus, EmbeddingMatrix(vectors), group_topics)


def write(data: SyntheticData, out_prefix) -> dict[str, str]:
    """Write corpus, embeddings, and planted ground truth next to a prefix."""
    prefix = str(out_prefix)
    paths = {
        "corpus": prefix + CORPUS_SUFFIX,
        "embeddings": prefix + EMBEDDINGS_SUFFIX,
        "truth": prefix + TRUTH_SUFFIX,
    }
    save_corpus(data.corpus, paths["corpus"])
    write_embeddings(data.embeddings, paths["embeddings"])
    with open(paths["truth"], "w", encoding="utf-8") as fh:
        for doc, topics in zip(data.corpus.documents, data.group_topics):
            record = {"doc_id": doc.doc_id, "topics": [int(t) for t in topics]}
            fh.write(json.dumps(record))
            fh.write("\n")
    return paths


def load_truth(path) -> list[tuple[str, np.ndarray]]:
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            out.append((record["doc_id"], np.asarray(record["topics"], dtype=np.int64)))
    return out
