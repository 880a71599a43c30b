"""Block catalog: ingestion, embeddings, and ranked retrieval."""

from .catalog import BlockCatalog, bar_aligned
from .embedding import audio_feature_vector, embed_block, embed_text, text_similarity
from .keys import (
    circle_of_fifths_distance,
    estimate_key,
    estimate_key_from_histogram,
    key_compatibility,
    pitch_class_histogram,
)
from .model import (
    Block,
    BlockQuery,
    RetrievalResult,
    ScoreBreakdown,
    TemporalType,
    TimbralType,
)

__all__ = [
    "Block",
    "BlockCatalog",
    "BlockQuery",
    "RetrievalResult",
    "ScoreBreakdown",
    "TemporalType",
    "TimbralType",
    "audio_feature_vector",
    "bar_aligned",
    "circle_of_fifths_distance",
    "embed_block",
    "embed_text",
    "estimate_key",
    "estimate_key_from_histogram",
    "key_compatibility",
    "pitch_class_histogram",
    "text_similarity",
]
