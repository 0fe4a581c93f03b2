import numpy as np
import pytest

from bostopics.corpus import build_corpus
from bostopics.embeddings import EmbeddingMatrix


def make_corpus(spec):
    """Build a corpus from [(doc_id, label, groups-of-sentences-of-tokens)]."""
    return build_corpus(spec)


@pytest.fixture
def two_doc_corpus():
    return make_corpus(
        [
            (
                "a",
                "sports",
                [
                    [["the", "fish", "eats", "you"], ["you", "eat", "a", "fish"]],
                    [["game", "over"]],
                ],
            ),
            ("b", None, [[["rtx", "2080"], ["fast", "gpu"], ["very", "fast"]]]),
        ]
    )


def random_embeddings(n, dim, seed=0):
    rng = np.random.default_rng(seed)
    rows = rng.normal(size=(n, dim)).astype(np.float32)
    return EmbeddingMatrix(rows)
