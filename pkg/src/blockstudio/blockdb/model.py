"""Block catalog domain types."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..audio.buffer import Key
from ..errors import EmptyQuery

EMBEDDING_DIM = 80
TEXT_DIM = 64
AUDIO_DIM = 16


class TimbralType(str, enum.Enum):
    """Instrument-role axis of the block ontology."""

    DRUMS = "drums"
    BASS = "bass"
    CHORDS = "chords"
    MELODY = "melody"
    VOCAL = "vocal"
    FX = "fx"


class TemporalType(str, enum.Enum):
    """Song-structure axis of the block ontology."""

    INTRO = "intro"
    VERSE = "verse"
    PRE_CHORUS = "pre_chorus"
    CHORUS = "chorus"
    BRIDGE = "bridge"
    OUTRO = "outro"


@dataclass(frozen=True)
class Block:
    """One attributable audio segment: a single stem in a single section.

    ``creator_id`` is immutable (the dataclass is frozen) and every block
    keeps it from ingestion onward.
    """

    block_id: str
    creator_id: str
    timbral: TimbralType
    temporal: TemporalType
    bpm: float
    key: Key
    bar_length: int
    caption: str
    embedding: tuple[float, ...]
    audio_ref: str
    created_at: float
    source_track_id: str | None = None

    def __post_init__(self):
        if not self.creator_id:
            raise ValueError("creator_id must be non-empty")
        if self.bpm <= 0:
            raise ValueError("bpm must be positive")
        if self.bar_length < 1:
            raise ValueError("bar_length must be >= 1")
        if len(self.embedding) != EMBEDDING_DIM:
            raise ValueError(f"embedding must have {EMBEDDING_DIM} dims")


@dataclass
class BlockQuery:
    """Filtered, ranked catalog lookup.

    At least one of text / timbral / temporal must be present.  Optional
    bpm and key criteria act as hard filters and contribute to the score;
    absent criteria count as a perfect 1.0 in their score slot.
    """

    text: str | None = None
    timbral: TimbralType | None = None
    temporal: TemporalType | None = None
    bpm_center: float | None = None
    bpm_tolerance: float | None = None
    key: Key | None = None
    min_key_compatibility: float = 0.0
    creator_id: str | None = None
    limit: int = 10

    def __post_init__(self):
        if self.text is None and self.timbral is None and self.temporal is None:
            raise EmptyQuery("query needs text, timbral, or temporal criteria")
        if self.limit < 1:
            raise ValueError("limit must be positive")
        if self.bpm_center is not None and (
            self.bpm_tolerance is None or self.bpm_tolerance <= 0
        ):
            raise ValueError("bpm_center requires a positive bpm_tolerance")


@dataclass(frozen=True)
class ScoreBreakdown:
    text_similarity: float
    bpm_proximity: float
    key_compatibility: float


@dataclass(frozen=True)
class RetrievalResult:
    block_id: str
    score: float
    breakdown: ScoreBreakdown = field(
        default_factory=lambda: ScoreBreakdown(1.0, 1.0, 1.0)
    )
