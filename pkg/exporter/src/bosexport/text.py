"""Sentence splitting, word tokenization, and grouping rules.

These rules are duplicated from the engine on purpose: the exporter is a
standalone package that talks to the engine only through files, and the
conformance suite checks both implementations agree on shared fixtures.
Any change here must be mirrored there (and vice versa) or the tests
fail.
"""

from __future__ import annotations

import re
from typing import Sequence, TypeVar

T = TypeVar("T")

_WORD_RE = re.compile(r"[^\W_]+")

_TERMINATORS = frozenset(".!?")

ABBREVIATIONS = frozenset({"mr.", "dr.", "e.g.", "i.e.", "etc.", "vs.", "st.", "no."})


def split_sentences(raw_text: str) -> list[str]:
    """Split after '.', '!' or '?' followed by whitespace+uppercase or end
    of text; a fixed abbreviation list suppresses splits."""
    if not raw_text.strip():
        return []
    sentences: list[str] = []
    start = 0
    for i, ch in enumerate(raw_text):
        if ch not in _TERMINATORS:
            continue
        if not _boundary_after(raw_text, i):
            continue
        if ch == "." and _preceding_word(raw_text, i) in ABBREVIATIONS:
            continue
        piece = raw_text[start : i + 1].strip()
        if piece:
            sentences.append(piece)
        start = i + 1
    tail = raw_text[start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


def _boundary_after(text: str, i: int) -> bool:
    j = i + 1
    if j >= len(text):
        return True
    if not text[j].isspace():
        return False
    while j < len(text) and text[j].isspace():
        j += 1
    return j >= len(text) or text[j].isupper()


def _preceding_word(text: str, i: int) -> str:
    start = i
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : i + 1].lower()


def tokenize_words(sentence: str) -> list[str]:
    """Lowercased maximal runs of Unicode letters/digits, in order."""
    return _WORD_RE.findall(sentence.lower())


def group_sentences(sentences: Sequence[T], size: int) -> list[list[T]]:
    """Consecutive groups of ``size`` sentences; trailing partial kept."""
    if size < 1:
        raise ValueError(f"group size must be >= 1, got {size}")
    return [list(sentences[i : i + size]) for i in range(0, len(sentences), size)]
