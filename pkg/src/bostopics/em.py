"""Annealed hard-assignment EM over sentence-group embeddings.

Each epoch assigns every sentence group of every document to exactly one
topic (the one maximizing cosine-to-topic-vector times the document's
topic probability), then recomputes topic vectors as means of their
assigned group vectors and re-estimates the smoothed topic-document
distribution. Two annealing devices keep early epochs exploratory: the
smoothing pseudo-count starts large and halves per epoch down to the user
prior, and whole documents are assigned to their second-best topics with
a probability that decays to zero by the final epoch.

The E-step is parallel over fixed-size document chunks and the M-step
reduces in document order, so results are bitwise identical for any
worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .embeddings import (
    EmbeddingMatrix,
    cosine,
    read_embeddings,
    unit_normalize,
    write_embeddings,
)
from .errors import InvalidConfigError, ValidationError
from .initialization import Rng, kmeanspp_init

# Documents per E-step work unit. Fixed (not derived from the thread
# count) so chunk boundaries, and therefore float results, never change
# with parallelism.
_DOC_CHUNK = 256

TOPIC_VECTORS_FILE = "topic_vectors.bose"
TOPIC_DOC_FILE = "topic_doc.bose"
ASSIGNMENTS_FILE = "assignments.jsonl"
MANIFEST_FILE = "manifest.json"


@dataclass(frozen=True)
class FitConfig:
    """Hyperparameters of one fit.

    ``alpha`` is the user prior on topics per document: large values pull
    p(topic|doc) toward uniform, values near zero concentrate it. The
    smoothing pseudo-count starts at max(initial_smoothing, alpha) and
    halves each epoch until it reaches alpha.
    """

    k: int
    alpha: float = 2.0
    sentences_per_group: int = 3
    epochs: int = 10
    initial_smoothing: float = 8.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise InvalidConfigError(f"k must be >= 1, got {self.k}")
        if self.alpha < 0:
            raise InvalidConfigError(f"alpha must be >= 0, got {self.alpha}")
        if self.sentences_per_group < 1:
            raise InvalidConfigError("sentences_per_group must be >= 1")
        if self.epochs < 1:
            raise InvalidConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.initial_smoothing <= 0:
            raise InvalidConfigError("initial_smoothing must be > 0")

    @property
    def starting_smoothing(self) -> float:
        return max(float(self.initial_smoothing), float(self.alpha))


@dataclass
class ModelState:
    """Everything a fit produces.

    ``topic_vectors`` are raw means of the assigned (unit-normalized)
    group vectors; ``topic_doc[d, t]`` is the smoothed p(topic|doc);
    ``assignments[d][i]`` is the topic of document d's i-th group.
    ``smoothing`` is the pseudo-count that produced the current
    topic_doc.
    """

    topic_vectors: np.ndarray
    topic_doc: np.ndarray
    assignments: list[np.ndarray]
    smoothing: float
    doc_ids: list[str]
    config: FitConfig
    smoothing_history: list[float] = field(default_factory=list)

    @property
    def k(self) -> int:
        return self.topic_vectors.shape[0]

    @property
    def n_docs(self) -> int:
        return len(self.doc_ids)

    def doc_group_starts(self) -> np.ndarray:
        """Offsets of each document's first group in global row order."""
        counts = np.fromiter((len(a) for a in self.assignments), dtype=np.int64)
        return np.concatenate(([0], np.cumsum(counts)))


def decay_smoothing(smoothing: float, alpha: float) -> float:
    """Halve the pseudo-count, never dropping below the user prior."""
    return max(smoothing / 2.0, alpha)


def rank1_probability(epoch: int, epochs: int) -> float:
    """Probability that a document keeps best-topic assignments this epoch."""
    return min(1.0, 0.5 + epoch / (2.0 * epochs))


def explore_rank(epoch: int, epochs: int, r: float) -> int:
    """Turn a document's uniform draw into an assignment rank (1 or 2)."""
    return 1 if r < rank1_probability(epoch, epochs) else 2


def select_topic(group_vector, topic_vectors, topic_doc_row, rank: int = 1) -> int:
    """Pick the topic with the rank-th largest cosine * p(topic|doc).

    Ties go to the smaller topic id. With a single topic, rank 2 falls
    back to rank 1.
    """
    topics = np.asarray(topic_vectors, dtype=np.float64)
    row = np.asarray(topic_doc_row, dtype=np.float64)
    k = topics.shape[0]
    v = np.asarray(group_vector, dtype=np.float64).ravel()
    norms = np.linalg.norm(topics, axis=1)
    vnorm = np.linalg.norm(v)
    sims = np.zeros(k)
    ok = norms > 0.0
    if vnorm > 0.0:
        sims[ok] = np.clip(topics[ok] @ v / (norms[ok] * vnorm), -1.0, 1.0)
    products = sims * row
    first = int(np.argmax(products))
    if rank == 1 or k < 2:
        return first
    products = products.copy()
    products[first] = -np.inf
    return int(np.argmax(products))


def e_step(
    state: ModelState,
    corpus: Corpus,
    embeddings: EmbeddingMatrix,
    epoch: int,
    epochs: int,
    rng: Rng,
    threads: int = 1,
) -> list[np.ndarray]:
    """Assign every group of every document to one topic.

    ``embeddings`` must have unit-normalized rows (fit normalizes once),
    which lets the similarity reduce to one matrix product per chunk.
    Every group draws its own exploration rank for the epoch (keyed by
    its global index), so early epochs scatter a decaying fraction of
    each document's groups to their second-best topics.
    """
    rows = embeddings.rows
    topics = state.topic_vectors
    tnorm = np.linalg.norm(topics.astype(np.float64), axis=1)
    tnorm[tnorm == 0.0] = 1.0
    topics_unit = (topics / tnorm[:, None]).astype(np.float32)

    counts = np.fromiter((len(d) for d in corpus.documents), dtype=np.int64)
    starts = np.concatenate(([0], np.cumsum(counts)))
    n_docs = len(corpus.documents)
    draws = rng.exploration_uniforms(epoch, np.arange(starts[-1]))
    threshold = rank1_probability(epoch, epochs)
    explore = (draws >= threshold) & (state.k >= 2)

    out: list[np.ndarray] = [None] * n_docs  # type: ignore[list-item]

    def run_chunk(chunk_start: int) -> None:
        chunk_end = min(chunk_start + _DOC_CHUNK, n_docs)
        g0, g1 = starts[chunk_start], starts[chunk_end]
        sims = rows[g0:g1] @ topics_unit.T
        for d in range(chunk_start, chunk_end):
            scores = sims[starts[d] - g0 : starts[d + 1] - g0] * state.topic_doc[d]
            best = np.argmax(scores, axis=1)
            flip = explore[starts[d] : starts[d + 1]]
            if flip.any():
                scores[np.arange(scores.shape[0]), best] = -np.inf
                best = np.where(flip, np.argmax(scores, axis=1), best)
            out[d] = best.astype(np.int32)

    chunk_starts = range(0, n_docs, _DOC_CHUNK)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_chunk, chunk_starts))
    else:
        for c in chunk_starts:
            run_chunk(c)
    return out


def m_step(
    assignments: list[np.ndarray],
    embeddings: EmbeddingMatrix,
    smoothing: float,
    k: int,
    previous_vectors: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Recompute topic vectors and the smoothed topic-document rows.

    A topic with no assigned groups keeps its previous vector, so that
    smoothing can revive it in a later epoch. Sums run in float64, in
    document order, regardless of how the E-step was parallelized.
    """
    rows = embeddings.rows
    flat = (
        np.concatenate(assignments).astype(np.int64)
        if assignments
        else np.empty(0, dtype=np.int64)
    )
    counts = np.bincount(flat, minlength=k)
    sums = np.zeros((k, rows.shape[1]), dtype=np.float64)
    for t in range(k):
        if counts[t]:
            sums[t] = rows[flat == t].sum(axis=0, dtype=np.float64)
    topic_vectors = np.array(previous_vectors, dtype=np.float32, copy=True)
    active = counts > 0
    topic_vectors[active] = (sums[active] / counts[active, None]).astype(np.float32)

    sizes = np.fromiter((len(a) for a in assignments), dtype=np.float64)
    doc_counts = np.stack(
        [np.bincount(a, minlength=k) for a in assignments]
    ).astype(np.float64)
    topic_doc = (doc_counts + smoothing) / (sizes[:, None] + k * smoothing)
    return topic_vectors, topic_doc.astype(np.float32)


def fit(
    corpus: Corpus,
    embeddings: EmbeddingMatrix,
    config: FitConfig,
    threads: int = 1,
    epoch_callback=None,
) -> ModelState:
    """Run k-means++ seeding and the full annealed EM schedule.

    ``epoch_callback(epoch, state)``, when given, is invoked after every
    epoch's M-step; useful for invariant checks and progress reporting.
    Results are bitwise independent of ``threads``.
    """
    n_groups = corpus.total_groups()
    if embeddings.n_rows != n_groups:
        raise ValidationError(
            f"corpus has {n_groups} groups but embeddings have "
            f"{embeddings.n_rows} rows"
        )
    if config.k > n_groups:
        raise InvalidConfigError(
            f"k={config.k} exceeds the corpus group count {n_groups}"
        )
    threads = max(1, int(threads))

    unit = unit_normalize(embeddings)
    rng = Rng(config.seed)
    state = ModelState(
        topic_vectors=kmeanspp_init(unit, config.k, rng),
        topic_doc=np.full(
            (len(corpus.documents), config.k), 1.0 / config.k, dtype=np.float32
        ),
        assignments=[],
        smoothing=config.starting_smoothing,
        doc_ids=[d.doc_id for d in corpus.documents],
        config=config,
    )
    smoothing = config.starting_smoothing
    for epoch in range(1, config.epochs + 1):
        assignments = e_step(state, corpus, unit, epoch, config.epochs, rng, threads)
        vectors, topic_doc = m_step(
            assignments, unit, smoothing, config.k, state.topic_vectors
        )
        state.assignments = assignments
        state.topic_vectors = vectors
        state.topic_doc = topic_doc
        state.smoothing = smoothing
        state.smoothing_history.append(smoothing)
        if epoch_callback is not None:
            epoch_callback(epoch, state)
        smoothing = decay_smoothing(smoothing, config.alpha)
    # Refresh assignments under the final vectors and distribution so the
    # published state is self-consistent: each group's topic is the argmax
    # of cosine times p(topic|doc) at the returned parameters. The final
    # epoch's rank is deterministically 1, so this consumes no randomness.
    state.assignments = e_step(
        state, corpus, unit, config.epochs, config.epochs, rng, threads
    )
    return state


@dataclass
class GroupPosterior:
    """Diagnostic view of one group's per-topic affinities.

    ``posterior`` is max(products)/sum(products); with negative cosines it
    can leave [0, 1], which ``within_unit_interval`` flags instead of
    clamping.
    """

    products: np.ndarray
    best_topic: int
    posterior: float
    within_unit_interval: bool


def group_posterior(
    state: ModelState,
    embeddings: EmbeddingMatrix,
    doc_index: int,
    group_index: int,
) -> GroupPosterior:
    if not 0 <= doc_index < state.n_docs:
        raise IndexError(f"doc_index {doc_index} out of range")
    starts = state.doc_group_starts()
    n_doc_groups = int(starts[doc_index + 1] - starts[doc_index])
    if not 0 <= group_index < n_doc_groups:
        raise IndexError(f"group_index {group_index} out of range")
    vector = embeddings.rows[int(starts[doc_index]) + group_index]
    row = state.topic_doc[doc_index].astype(np.float64)
    sims = np.zeros(state.k)
    for t in range(state.k):
        topic_vector = state.topic_vectors[t]
        if np.any(topic_vector != 0.0):
            sims[t] = cosine(vector, topic_vector)
    products = sims * row
    best = int(np.argmax(products))
    total = products.sum()
    posterior = float(products[best] / total) if total != 0.0 else float("nan")
    return GroupPosterior(
        products=products,
        best_topic=best,
        posterior=posterior,
        within_unit_interval=bool(0.0 <= posterior <= 1.0),
    )


def save_model(state: ModelState, model_dir) -> None:
    """Write the model directory: vectors, topic_doc, assignments, manifest."""
    path = Path(model_dir)
    path.mkdir(parents=True, exist_ok=True)
    write_embeddings(EmbeddingMatrix(state.topic_vectors), path / TOPIC_VECTORS_FILE)
    write_embeddings(EmbeddingMatrix(state.topic_doc), path / TOPIC_DOC_FILE)
    with open(path / ASSIGNMENTS_FILE, "w", encoding="utf-8") as fh:
        for doc_id, assigned in zip(state.doc_ids, state.assignments):
            record = {"doc_id": doc_id, "topics": [int(t) for t in assigned]}
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")
    manifest = {
        "k": state.config.k,
        "alpha": state.config.alpha,
        "sentences_per_group": state.config.sentences_per_group,
        "epochs": state.config.epochs,
        "initial_smoothing": state.config.initial_smoothing,
        "seed": state.config.seed,
        "epochs_run": len(state.smoothing_history),
        "final_smoothing": state.smoothing,
        "smoothing_history": list(state.smoothing_history),
    }
    with open(path / MANIFEST_FILE, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def load_model(model_dir) -> ModelState:
    path = Path(model_dir)
    with open(path / MANIFEST_FILE, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    config = FitConfig(
        k=manifest["k"],
        alpha=manifest["alpha"],
        sentences_per_group=manifest["sentences_per_group"],
        epochs=manifest["epochs"],
        initial_smoothing=manifest["initial_smoothing"],
        seed=manifest["seed"],
    )
    topic_vectors = read_embeddings(path / TOPIC_VECTORS_FILE).rows
    topic_doc = read_embeddings(path / TOPIC_DOC_FILE).rows
    doc_ids: list[str] = []
    assignments: list[np.ndarray] = []
    with open(path / ASSIGNMENTS_FILE, "r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            record = json.loads(line)
            doc_ids.append(record["doc_id"])
            assignments.append(np.asarray(record["topics"], dtype=np.int32))
    if topic_vectors.shape[0] != config.k:
        raise ValidationError("topic_vectors row count does not match manifest k")
    if topic_doc.shape != (len(doc_ids), config.k):
        raise ValidationError("topic_doc shape does not match assignments/manifest")
    for assigned in assignments:
        if assigned.size and (assigned.min() < 0 or assigned.max() >= config.k):
            raise ValidationError("assignment topic id out of range")
    return ModelState(
        topic_vectors=topic_vectors,
        topic_doc=topic_doc,
        assignments=assignments,
        smoothing=float(manifest["final_smoothing"]),
        doc_ids=doc_ids,
        config=config,
        smoothing_history=[float(c) for c in manifest.get("smoothing_history", [])],
    )
