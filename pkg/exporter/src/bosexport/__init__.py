"""Raw text to bag-of-sentences corpus and embedding files."""

from .encoders import DEFAULT_ENCODER, HashingEncoder, get_encoder
from .export import ExportError, ExportJob, ExportReport, content_hash, export, verify
from .text import group_sentences, split_sentences, tokenize_words

__version__ = "0.1.0"
