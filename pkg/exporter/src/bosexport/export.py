"""Convert raw-text JSONL into the engine's corpus and embedding files.

Input: one JSON object per line, {"doc_id": str, "text": str, optional
"label": str}. Each document is sentence-split, grouped into runs of
``sentences_per_group`` consecutive sentences, and each group is encoded
as one vector (by default from the group's concatenated text). The
written corpus line-format and binary embedding file follow the engine's
formats exactly, with embedding rows in global group order, plus a
manifest recording the encoder, shapes, and a content hash.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from .bose import BoseFormatError, read_matrix, write_matrix
from .encoders import DEFAULT_ENCODER, Encoder, get_encoder
from .text import group_sentences, split_sentences, tokenize_words

CORPUS_SUFFIX = ".corpus.jsonl"
EMBEDDINGS_SUFFIX = ".embeddings.bose"
MANIFEST_SUFFIX = ".manifest.json"


class ExportError(Exception):
    pass


@dataclass
class ExportJob:
    input_path: str
    output_prefix: str
    encoder_name: str = DEFAULT_ENCODER
    sentences_per_group: int = 3
    batch_size: int = 64
    mean_of_sentences: bool = False  # fallback for groups beyond encoder context


@dataclass
class ExportReport:
    n_docs: int
    n_groups: int
    dim: int
    skipped_docs: list[str] = field(default_factory=list)
    paths: dict = field(default_factory=dict)


def _read_raw(path):
    records = []
    seen = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ExportError(f"line {line_no}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict) or "doc_id" not in record or "text" not in record:
                raise ExportError(f"line {line_no}: need 'doc_id' and 'text' fields")
            doc_id = record["doc_id"]
            if not isinstance(doc_id, str) or not isinstance(record["text"], str):
                raise ExportError(f"line {line_no}: 'doc_id' and 'text' must be strings")
            if doc_id in seen:
                raise ExportError(f"line {line_no}: duplicate doc_id {doc_id!r}")
            seen.add(doc_id)
            label = record.get("label")
            if label is not None and not isinstance(label, str):
                raise ExportError(f"line {line_no}: 'label' must be a string or null")
            records.append((doc_id, label, record["text"]))
    return records


def export(job: ExportJob, encoder: Encoder | None = None) -> ExportReport:
    """Run the full pipeline and write the three output files.

    Everything is staged in memory and written only after the corpus and
    embedding row counts are known to agree, so a failure never leaves a
    partial pair behind. Documents with no sentences are skipped with a
    warning on stderr.
    """
    if job.sentences_per_group < 1:
        raise ExportError("sentences_per_group must be >= 1")
    if encoder is None:
        encoder = get_encoder(job.encoder_name, batch_size=job.batch_size)
    if encoder.dim < 1:
        raise ExportError(f"encoder reports dimension {encoder.dim}")

    records = _read_raw(job.input_path)
    corpus_lines = []
    group_texts: list[list[str]] = []  # per group: sentence texts
    skipped = []
    for doc_id, label, text in records:
        sentences = split_sentences(text)
        if not sentences:
            skipped.append(doc_id)
            print(f"warning: skipping {doc_id!r}: no sentences", file=sys.stderr)
            continue
        groups = group_sentences(sentences, job.sentences_per_group)
        corpus_lines.append(
            {
                "doc_id": doc_id,
                "label": label,
                "groups": [[tokenize_words(s) for s in g] for g in groups],
            }
        )
        group_texts.extend(groups)

    n_groups = len(group_texts)
    total_in_corpus = sum(len(line["groups"]) for line in corpus_lines)
    if total_in_corpus != n_groups:
        raise ExportError(
            f"internal row mismatch: corpus has {total_in_corpus} groups, "
            f"encoder queue has {n_groups}"
        )

    vectors = np.empty((n_groups, encoder.dim), dtype=np.float32)
    row = 0
    for start in range(0, n_groups, job.batch_size):
        batch = group_texts[start : start + job.batch_size]
        if job.mean_of_sentences:
            for sentences in batch:
                per_sentence = encoder.encode(sentences)
                _check_dim(encoder, per_sentence)
                vectors[row] = per_sentence.mean(axis=0, dtype=np.float64).astype(
                    np.float32
                )
                row += 1
        else:
            encoded = encoder.encode([" ".join(sentences) for sentences in batch])
            _check_dim(encoder, encoded)
            vectors[row : row + len(batch)] = encoded
            row += len(batch)
    if row != n_groups:
        raise ExportError(f"encoder produced {row} rows for {n_groups} groups")

    prefix = str(job.output_prefix)
    paths = {
        "corpus": prefix + CORPUS_SUFFIX,
        "embeddings": prefix + EMBEDDINGS_SUFFIX,
        "manifest": prefix + MANIFEST_SUFFIX,
    }
    with open(paths["corpus"], "w", encoding="utf-8") as fh:
        for line in corpus_lines:
            fh.write(json.dumps(line, ensure_ascii=False))
            fh.write("\n")
    write_matrix(vectors, paths["embeddings"])
    manifest = {
        "encoder": encoder.name,
        "dim": encoder.dim,
        "n_s": job.sentences_per_group,
        "n_docs": len(corpus_lines),
        "n_groups": n_groups,
        "sha256": content_hash(paths["corpus"], paths["embeddings"]),
    }
    with open(paths["manifest"], "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return ExportReport(
        n_docs=len(corpus_lines),
        n_groups=n_groups,
        dim=encoder.dim,
        skipped_docs=skipped,
        paths=paths,
    )


def _check_dim(encoder: Encoder, encoded: np.ndarray) -> None:
    if encoded.ndim != 2 or encoded.shape[1] != encoder.dim:
        raise ExportError(
            f"encoder returned shape {encoded.shape}, expected (*, {encoder.dim})"
        )


def content_hash(corpus_path, embeddings_path) -> str:
    """One digest over both output files, corpus bytes first."""
    digest = hashlib.sha256()
    for path in (corpus_path, embeddings_path):
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 20), b""):
                digest.update(chunk)
    return digest.hexdigest()


def verify(prefix) -> dict:
    """Re-read an exported pair and cross-check every consistency rule.

    Raises ExportError on the first inconsistency; returns a summary dict
    when everything holds.
    """
    prefix = str(prefix)
    corpus_path = prefix + CORPUS_SUFFIX
    embeddings_path = prefix + EMBEDDINGS_SUFFIX
    manifest_path = prefix + MANIFEST_SUFFIX

    try:
        with open(manifest_path, "r", encoding="utf-8") as fh:
            manifest = json.load(fh)
    except FileNotFoundError as exc:
        raise ExportError(f"missing manifest {manifest_path}") from exc

    n_docs = 0
    n_groups = 0
    try:
        with open(corpus_path, "r", encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                record = json.loads(line)
                groups = record["groups"]
                if not groups or any(not g for g in groups):
                    raise ExportError(f"corpus line {line_no}: empty document or group")
                n_docs += 1
                n_groups += len(groups)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ExportError(f"corpus file unreadable: {exc}") from exc

    try:
        matrix = read_matrix(embeddings_path)
    except (BoseFormatError, FileNotFoundError) as exc:
        raise ExportError(f"embeddings: {exc}") from exc

    if matrix.shape[0] != n_groups:
        raise ExportError(
            f"count mismatch: corpus has {n_groups} groups, "
            f"embeddings have {matrix.shape[0]} rows"
        )
    if matrix.shape[1] != manifest.get("dim"):
        raise ExportError(
            f"dim mismatch: embeddings {matrix.shape[1]}, manifest {manifest.get('dim')}"
        )
    if n_docs != manifest.get("n_docs") or n_groups != manifest.get("n_groups"):
        raise ExportError("manifest document/group counts do not match the files")
    actual_hash = content_hash(corpus_path, embeddings_path)
    if actual_hash != manifest.get("sha256"):
        raise ExportError("content hash mismatch: files or manifest were modified")
    return {
        "n_docs": n_docs,
        "n_groups": n_groups,
        "dim": int(matrix.shape[1]),
        "encoder": manifest.get("encoder"),
        "sha256": actual_hash,
    }
