"""Word-level topic scores from group-topic assignments.

Every word occurrence inherits the topic of its enclosing group. A word's
score within a topic multiplies a damped excess frequency (count above a
per-word chance threshold, square-rooted) by its relevance (probability
mass in the topic beyond the uniform 1/k baseline). Common words score
near zero everywhere, words concentrated in one or two documents are
suppressed by the threshold, and only positive scores are ever reported.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .corpus import Corpus

TOPICS_FILE = "topics.jsonl"


@dataclass
class TopicCounts:
    """Raw occurrence counts; everything else derives from these."""

    vocabulary: object
    word_topic_counts: np.ndarray  # (V, k) int64
    word_counts: np.ndarray  # (V,) int64, row sums
    max_doc_counts: np.ndarray  # (V,) int64, max occurrences in one document
    k: int

    @property
    def total_tokens(self) -> int:
        return int(self.word_counts.sum())


@dataclass
class TopicScores:
    counts: TopicCounts
    count_threshold: np.ndarray  # (V,) float64
    topic_given_word: np.ndarray  # (V, k) float64
    scores: np.ndarray  # (V, k) float64

    @property
    def k(self) -> int:
        return self.counts.k

    @property
    def vocabulary(self):
        return self.counts.vocabulary


class TopicWord(NamedTuple):
    word: str
    score: float
    count: int


def count_statistics(corpus: Corpus, assignments, k: int) -> TopicCounts:
    """Count word occurrences per topic, total, and per-document maximum.

    Duplicate occurrences all count; a word occurring in groups assigned
    to several topics contributes to each.
    """
    vocab_size = len(corpus.vocabulary)
    word_ids: list[int] = []
    topic_ids: list[int] = []
    max_doc = np.zeros(vocab_size, dtype=np.int64)
    for doc, assigned in zip(corpus.documents, assignments):
        doc_words: list[int] = []
        for group, topic in zip(doc.groups, assigned):
            for sentence in group.sentences:
                doc_words.extend(sentence)
                topic_ids.extend([int(topic)] * len(sentence))
        word_ids.extend(doc_words)
        if doc_words:
            uniq, counts = np.unique(
                np.asarray(doc_words, dtype=np.int64), return_counts=True
            )
            np.maximum.at(max_doc, uniq, counts)
    words = np.asarray(word_ids, dtype=np.int64)
    topics = np.asarray(topic_ids, dtype=np.int64)
    pair_counts = np.bincount(words * k + topics, minlength=vocab_size * k)
    word_topic = pair_counts.reshape(vocab_size, k).astype(np.int64)
    return TopicCounts(
        vocabulary=corpus.vocabulary,
        word_topic_counts=word_topic,
        word_counts=word_topic.sum(axis=1),
        max_doc_counts=max_doc,
        k=k,
    )


def count_threshold(word_topic_counts, max_doc_counts) -> np.ndarray:
    """Per-word count a topic must beat for the word to matter there.

    Expected count under uniform random assignment, plus the population
    standard deviation of the word's counts across topics, plus its
    maximum count within any single document (so one-document words
    cannot carry a topic).
    """
    counts = np.asarray(word_topic_counts, dtype=np.float64)
    k = counts.shape[-1]
    expected = counts.sum(axis=-1) / k
    spread = np.std(counts, axis=-1)  # population std: topics are the population
    return expected + spread + np.asarray(max_doc_counts, dtype=np.float64)


def score_topics(counts: TopicCounts) -> TopicScores:
    """Derive thresholds, p(topic|word), and the final score matrix."""
    wt = counts.word_topic_counts.astype(np.float64)
    totals = counts.word_counts.astype(np.float64)
    threshold = count_threshold(counts.word_topic_counts, counts.max_doc_counts)
    with np.errstate(invalid="ignore", divide="ignore"):
        topic_given_word = np.where(totals[:, None] > 0, wt / totals[:, None], 0.0)
    damped = np.sqrt(np.maximum(wt - threshold[:, None], 0.0))
    relevance = topic_given_word - 1.0 / counts.k
    scores = damped * relevance
    scores[totals == 0] = 0.0  # absent words are never reported
    return TopicScores(
        counts=counts,
        count_threshold=threshold,
        topic_given_word=topic_given_word,
        scores=scores,
    )


def top_words(scores: TopicScores, topic: int, limit: int = 10) -> list[TopicWord]:
    """Positive-score words of one topic, best first.

    Sorted by score, then by in-topic count, then alphabetically. May
    return fewer than ``limit`` words, or none at all.
    """
    column = scores.scores[:, topic]
    candidates = np.flatnonzero(column > 0.0)
    word_of = scores.vocabulary.word_of
    items = [
        TopicWord(
            word=word_of(int(w)),
            score=float(column[w]),
            count=int(scores.counts.word_topic_counts[w, topic]),
        )
        for w in candidates
    ]
    items.sort(key=lambda it: (-it.score, -it.count, it.word))
    return items[:limit]


def all_top_words(scores: TopicScores, limit: int | None = None) -> list[list[TopicWord]]:
    cap = len(scores.vocabulary) if limit is None else limit
    return [top_words(scores, t, cap) for t in range(scores.k)]


def save_topics(scores: TopicScores, path, limit: int | None = None) -> None:
    """Write ranked topic words as JSON lines, one object per topic."""
    with open(path, "w", encoding="utf-8") as fh:
        for topic, words in enumerate(all_top_words(scores, limit)):
            record = {
                "topic": topic,
                "words": [
                    {"w": w.word, "score": w.score, "n_wt": w.count} for w in words
                ],
            }
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")


def load_topics(path) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
