"""Bag-of-sentences topic modeling over pretrained sentence-group embeddings."""

from .corpus import (
    Corpus,
    Document,
    SentenceGroup,
    Vocabulary,
    build_corpus,
    corpus_from_texts,
    group_sentences,
    load_corpus,
    save_corpus,
    split_sentences,
    tokenize_words,
)
from .em import (
    FitConfig,
    ModelState,
    decay_smoothing,
    e_step,
    explore_rank,
    fit,
    group_posterior,
    load_model,
    m_step,
    rank1_probability,
    save_model,
    select_topic,
)
from .embeddings import (
    EmbeddingMatrix,
    cosine,
    read_embeddings,
    unit_normalize,
    write_embeddings,
)
from .errors import (
    BosError,
    DegenerateInputError,
    FormatError,
    InvalidConfigError,
    ParseError,
    ValidationError,
)
from .initialization import Rng, kmeanspp_init
from .metrics import (
    ReferenceIndex,
    build_reference_index,
    doc_topic_labels,
    nmi,
    npmi_coherence,
)
from .scoring import (
    TopicCounts,
    TopicScores,
    count_statistics,
    count_threshold,
    score_topics,
    top_words,
)

__version__ = "0.1.0"
