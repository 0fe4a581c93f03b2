"""Documents as ordered groups of consecutive sentences.

This layer owns text preparation: rule-based sentence splitting, word
tokenization, grouping sentences into fixed-size consecutive groups, and
the line-oriented JSON corpus format. Everything downstream (EM, scoring,
metrics) consumes the structures defined here and never re-tokenizes.

Corpora are immutable after construction and safe to read from any number
of threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TypeVar

from .errors import InvalidConfigError, ParseError, ValidationError

# A sentence is an ordered list of word ids; duplicates allowed.
Sentence = list[int]

T = TypeVar("T")

# Maximal runs of Unicode letters/digits; underscores and punctuation split.
_WORD_RE = re.compile(r"[^\W_]+")

_TERMINATORS = frozenset(".!?")

# Trailing words (matched case-insensitively, terminator included) that do
# not end a sentence even when followed by whitespace and a capital.
ABBREVIATIONS = frozenset({"mr.", "dr.", "e.g.", "i.e.", "etc.", "vs.", "st.", "no."})


def split_sentences(raw_text: str) -> list[str]:
    """Split raw text into sentences with a fixed rule set.

    A sentence ends at '.', '!' or '?' when followed by whitespace and an
    uppercase character, or at end of text. Splits after the
    abbreviations in ``ABBREVIATIONS`` are suppressed. Text without any
    terminator comes back as a single sentence; empty or whitespace-only
    input yields an empty list. Concatenating the returned sentences
    reproduces the input up to whitespace.
    """
    if not raw_text.strip():
        return []
    sentences: list[str] = []
    n = len(raw_text)
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
    """True when position i is followed by whitespace+uppercase or text end."""
    j = i + 1
    if j >= len(text):
        return True
    if not text[j].isspace():
        return False
    while j < len(text) and text[j].isspace():
        j += 1
    return j >= len(text) or text[j].isupper()


def _preceding_word(text: str, i: int) -> str:
    """The whitespace-delimited word ending at index i, lowercased."""
    start = i
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start : i + 1].lower()


def tokenize_words(sentence: str) -> list[str]:
    """Lowercase a sentence and return maximal letter/digit runs.

    Punctuation is dropped, numbers are kept, order and duplicates are
    preserved. Idempotent on its own space-joined output.
    """
    return _WORD_RE.findall(sentence.lower())


def group_sentences(sentences: Sequence[T], size: int) -> list[list[T]]:
    """Partition a sentence list into consecutive groups of ``size``.

    The trailing group may be shorter but is kept. ``size`` must be >= 1.
    """
    if size < 1:
        raise InvalidConfigError(f"group size must be >= 1, got {size}")
    return [list(sentences[i : i + size]) for i in range(0, len(sentences), size)]


class Vocabulary:
    """Bidirectional word <-> id map; ids follow first-occurrence order."""

    __slots__ = ("_word_to_id", "_id_to_word")

    def __init__(self) -> None:
        self._word_to_id: dict[str, int] = {}
        self._id_to_word: list[str] = []

    def intern(self, word: str) -> int:
        wid = self._word_to_id.get(word)
        if wid is None:
            wid = len(self._id_to_word)
            self._word_to_id[word] = wid
            self._id_to_word.append(word)
        return wid

    def id_of(self, word: str) -> int:
        return self._word_to_id[word]

    def word_of(self, word_id: int) -> str:
        return self._id_to_word[word_id]

    def words(self) -> list[str]:
        return list(self._id_to_word)

    def __contains__(self, word: str) -> bool:
        return word in self._word_to_id

    def __len__(self) -> int:
        return len(self._id_to_word)


@dataclass
class SentenceGroup:
    """A run of consecutive sentences embedded as one vector downstream."""

    sentences: list[Sentence]
    global_index: int


@dataclass
class Document:
    doc_id: str
    groups: list[SentenceGroup]
    label: str | None = None

    def __len__(self) -> int:
        return len(self.groups)


@dataclass
class Corpus:
    documents: list[Document]
    vocabulary: Vocabulary = field(default_factory=Vocabulary)

    def total_groups(self) -> int:
        return sum(len(d) for d in self.documents)

    def group_counts(self) -> list[int]:
        return [len(d) for d in self.documents]

    def document_index(self, doc_id: str) -> int:
        for i, doc in enumerate(self.documents):
            if doc.doc_id == doc_id:
                return i
        raise KeyError(doc_id)

    def group_tokens(self, doc_index: int, group_index: int) -> list[str]:
        group = self.documents[doc_index].groups[group_index]
        word_of = self.vocabulary.word_of
        return [word_of(w) for s in group.sentences for w in s]


TokenGroups = list[list[list[str]]]  # groups -> sentences -> token strings


def build_corpus(entries: Iterable[tuple[str, str | None, TokenGroups]]) -> Corpus:
    """Assemble a corpus from pre-tokenized documents.

    ``entries`` yields (doc_id, label, groups) where groups are lists of
    sentences and each sentence is a list of token strings. Group
    boundaries are taken as given. Word ids are assigned in first
    occurrence order, global group indices in document order.
    """
    vocab = Vocabulary()
    documents: list[Document] = []
    seen_ids: set[str] = set()
    next_group = 0
    for doc_id, label, groups in entries:
        if doc_id in seen_ids:
            raise ValidationError(f"duplicate doc_id {doc_id!r}")
        seen_ids.add(doc_id)
        if not groups:
            raise ValidationError(f"document {doc_id!r} has no sentences")
        doc_groups: list[SentenceGroup] = []
        for group in groups:
            if not group:
                raise ValidationError(f"document {doc_id!r} contains an empty group")
            sentences = [[vocab.intern(tok) for tok in sent] for sent in group]
            doc_groups.append(SentenceGroup(sentences, next_group))
            next_group += 1
        documents.append(Document(doc_id, doc_groups, label))
    return Corpus(documents, vocab)


def corpus_from_texts(
    texts: Iterable[tuple[str, str | None, str]], sentences_per_group: int = 3
) -> Corpus:
    """Build a corpus from raw text, applying the full tokenization path."""

    def entries():
        for doc_id, label, raw in texts:
            sentences = split_sentences(raw)
            token_sentences = [tokenize_words(s) for s in sentences]
            yield doc_id, label, group_sentences(token_sentences, sentences_per_group)

    return build_corpus(entries())


def save_corpus(corpus: Corpus, path) -> None:
    """Write the corpus in the line-oriented JSON format (UTF-8)."""
    word_of = corpus.vocabulary.word_of
    with open(path, "w", encoding="utf-8") as fh:
        for doc in corpus.documents:
            record = {
                "doc_id": doc.doc_id,
                "label": doc.label,
                "groups": [
                    [[word_of(w) for w in sent] for sent in g.sentences]
                    for g in doc.groups
                ],
            }
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")


def load_corpus(path) -> Corpus:
    """Read a corpus file; group boundaries in the file are authoritative.

    Raises ParseError (with the offending line number) on malformed lines
    and ValidationError on duplicate doc_ids or empty documents/groups.
    Loading the output of save_corpus reproduces the corpus exactly,
    including word ids.
    """
    entries: list[tuple[str, str | None, TokenGroups]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            entries.append(_parse_line(line, line_no))
    return build_corpus(entries)


def _parse_line(line: str, line_no: int) -> tuple[str, str | None, TokenGroups]:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(line_no, f"invalid JSON ({exc.msg})") from exc
    if not isinstance(record, dict):
        raise ParseError(line_no, "expected a JSON object")
    if "doc_id" not in record:
        raise ParseError(line_no, "missing 'doc_id' field")
    if "groups" not in record:
        raise ParseError(line_no, "missing 'groups' field")
    doc_id = record["doc_id"]
    if not isinstance(doc_id, str):
        raise ParseError(line_no, "'doc_id' must be a string")
    label = record.get("label")
    if label is not None and not isinstance(label, str):
        raise ParseError(line_no, "'label' must be a string or null")
    groups = record["groups"]
    if not isinstance(groups, list):
        raise ParseError(line_no, "'groups' must be a list")
    for group in groups:
        if not isinstance(group, list):
            raise ParseError(line_no, "each group must be a list of sentences")
        for sent in group:
            if not isinstance(sent, list) or any(
                not isinstance(tok, str) for tok in sent
            ):
                raise ParseError(line_no, "each sentence must be a list of strings")
    return doc_id, label, groups
