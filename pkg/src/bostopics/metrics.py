"""Model evaluation: clustering agreement and topic coherence.

Coverage is measured as normalized mutual information between the
document clustering induced by argmax p(topic|doc) and ground-truth
labels. Coherence is document-level normalized PMI of topic top-word
pairs under a pluggable reference corpus.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .em import ModelState
from .errors import ParseError, ValidationError

PAIR_EPSILON = 1e-12


def doc_topic_labels(state: ModelState) -> np.ndarray:
    """One topic label per document: argmax of p(topic|doc), ties low."""
    return np.argmax(state.topic_doc, axis=1)


def _first_occurrence_codes(labels: np.ndarray) -> np.ndarray:
    """Canonical integer codes: label names replaced by first-seen rank."""
    _, first_index, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.argsort(np.argsort(first_index))
    return rank[inverse]


def nmi(pred, truth) -> float:
    """Normalized mutual information, geometric-mean normalization.

    Natural logs. Two single-cluster partitions agree perfectly (1.0); if
    exactly one side is a single cluster there is nothing mutual (0.0).
    """
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ValidationError(
            f"label arrays must be equal-length 1-D, got {pred.shape} vs {truth.shape}"
        )
    n = pred.size
    if n < 1:
        raise ValidationError("labelings must be non-empty")
    pi = _first_occurrence_codes(pred)
    ti = _first_occurrence_codes(truth)
    if np.array_equal(pi, ti):
        return 1.0  # identical partitions, including both single-cluster
    # canonical argument order makes the float summation identical for
    # nmi(a, b) and nmi(b, a)
    if ti.tobytes() < pi.tobytes():
        pi, ti = ti, pi
    table = np.zeros((pi.max() + 1, ti.max() + 1), dtype=np.int64)
    np.add.at(table, (pi, ti), 1)
    joint = table / n
    # marginals from integer counts: a constant side yields exactly 1.0
    p_pred = table.sum(axis=1) / n
    p_truth = table.sum(axis=0) / n
    h_pred = -np.sum(p_pred[p_pred > 0] * np.log(p_pred[p_pred > 0]))
    h_truth = -np.sum(p_truth[p_truth > 0] * np.log(p_truth[p_truth > 0]))
    if h_pred == 0.0 and h_truth == 0.0:
        return 1.0
    if h_pred == 0.0 or h_truth == 0.0:
        return 0.0
    mask = joint > 0
    outer = np.outer(p_pred, p_truth)
    mutual = np.sum(joint[mask] * np.log(joint[mask] / outer[mask]))
    return float(np.clip(mutual / math.sqrt(h_pred * h_truth), 0.0, 1.0))


@dataclass
class ReferenceIndex:
    """Document-level co-occurrence statistics of a reference corpus."""

    n_docs: int
    doc_frequency: dict[str, int]
    pair_frequency: dict[tuple[str, str], int]

    def df(self, word: str) -> int:
        return self.doc_frequency.get(word, 0)

    def pair_count(self, a: str, b: str) -> int:
        return self.pair_frequency.get((a, b) if a <= b else (b, a), 0)


def build_reference_index(path, candidate_words=None) -> ReferenceIndex:
    """Count per-document word presence and pair co-occurrence.

    The reference file uses the corpus line-format; group boundaries are
    ignored and a word counts once per document. When ``candidate_words``
    is given (typically the union of topic top words), counting is
    restricted to it, which bounds memory on large references.
    """
    candidates = set(candidate_words) if candidate_words is not None else None
    doc_frequency: dict[str, int] = {}
    pair_frequency: dict[tuple[str, str], int] = {}
    n_docs = 0
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                groups = record["groups"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ParseError(line_no, f"bad reference record ({exc})") from exc
            n_docs += 1
            present = {
                tok for group in groups for sent in group for tok in sent
            }
            if candidates is not None:
                present &= candidates
            for word in present:
                doc_frequency[word] = doc_frequency.get(word, 0) + 1
            for a, b in combinations(sorted(present), 2):
                pair_frequency[(a, b)] = pair_frequency.get((a, b), 0) + 1
    if n_docs == 0:
        raise ValidationError("reference corpus is empty")
    return ReferenceIndex(n_docs, doc_frequency, pair_frequency)


def npmi_pair(index: ReferenceIndex, a: str, b: str) -> float:
    """Normalized PMI of one word pair under the reference.

    A word unseen in the reference makes the pair score -1. A pair
    co-occurring in every reference document scores 1 (the limit of the
    formula, which itself degenerates there).
    """
    df_a = index.df(a)
    df_b = index.df(b)
    if df_a == 0 or df_b == 0:
        return -1.0
    pair = index.pair_count(a, b)
    if pair >= index.n_docs:
        return 1.0
    p_a = df_a / index.n_docs
    p_b = df_b / index.n_docs
    p_ab = (pair + PAIR_EPSILON) / index.n_docs
    value = math.log(p_ab / (p_a * p_b)) / (-math.log(p_ab))
    return float(np.clip(value, -1.0, 1.0))


@dataclass
class CoherenceResult:
    overall: float | None  # None when every topic was skipped
    per_topic: list[float | None]  # None for skipped topics
    skipped: list[int]


def npmi_coherence(topic_top_words, index: ReferenceIndex) -> CoherenceResult:
    """Mean pairwise NPMI per topic, averaged over topics with >= 2 words.

    Word lists are deduplicated first so a pair never compares a word
    with itself; topics left with fewer than two words are skipped and
    reported.
    """
    per_topic: list[float | None] = []
    skipped: list[int] = []
    for topic, words in enumerate(topic_top_words):
        unique = list(dict.fromkeys(words))
        if len(unique) < 2:
            per_topic.append(None)
            skipped.append(topic)
            continue
        values = [npmi_pair(index, a, b) for a, b in combinations(unique, 2)]
        coherence = float(np.mean(values))
        if not -1.0 <= coherence <= 1.0:
            raise ValidationError(f"topic {topic} coherence {coherence} out of range")
        per_topic.append(coherence)
    retained = [v for v in per_topic if v is not None]
    overall = float(np.mean(retained)) if retained else None
    if overall is not None and not -1.0 <= overall <= 1.0:
        raise ValidationError(f"overall coherence {overall} out of range")
    return CoherenceResult(overall=overall, per_topic=per_topic, skipped=skipped)
