"""The block catalog: ingestion, storage, and filtered ranked retrieval.

Storage layout (when a root directory is given):

    root/blocks.jsonl     one JSON record per block, append-only, schema v1
    root/audio/<id>.wav   PCM16 WAV per block

Readers always see a consistent snapshot: the block tuple is swapped
atomically after an ingest finishes, so a half-ingested track is never
visible.  Retrieval is a linear scan, which is plenty below ~10^5 blocks.
"""
from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from ..audio.analysis import estimate_tempo, segment_structure
from ..audio.bands import band_split
from ..audio.buffer import AudioBuffer, Key
from ..audio.wav import load_wav, save_wav
from ..errors import EmptyAudio, MissingCreator, SegmentationFailed, UnknownBlock
from .embedding import embed_block, embed_text, text_similarity
from .keys import estimate_key, key_compatibility
from .model import Block, BlockQuery, RetrievalResult, ScoreBreakdown, TemporalType, TimbralType

SCHEMA_VERSION = 1

DEFAULT_SCORE_WEIGHTS = {"text": 0.6, "bpm": 0.2, "key": 0.2}

# stand-in mapping for tracks submitted without stems: frequency bands take
# the role of separated stems until a real separator replaces band_split
BAND_TIMBRAL_MAP = (TimbralType.BASS, TimbralType.CHORDS, TimbralType.MELODY)

_SECTION_LABEL_MAP = {
    "intro": TemporalType.INTRO,
    "verse": TemporalType.VERSE,
    "pre_chorus": TemporalType.PRE_CHORUS,
    "chorus": TemporalType.CHORUS,
    "bridge": TemporalType.BRIDGE,
    "outro": TemporalType.OUTRO,
}

_FALLBACK_BPM = 120.0


def bar_aligned(audio: AudioBuffer, bpm: float) -> tuple[AudioBuffer, int]:
    """Pad or trim to the nearest whole 4/4 bar count (at least one bar)."""
    bar_seconds = 4.0 * 60.0 / bpm
    bars = max(1, int(round(audio.duration_seconds / bar_seconds)))
    target = int(round(bars * bar_seconds * audio.sample_rate))
    samples = audio.samples
    if target <= audio.frame_count:
        samples = samples[:target]
    else:
        pad = np.zeros((target - audio.frame_count, audio.channels), dtype=np.float32)
        samples = np.concatenate([samples, pad])
    return AudioBuffer(samples, audio.sample_rate), bars


def record_to_block(record: dict) -> Block:
    return Block(
        block_id=record["block_id"],
        creator_id=record["creator_id"],
        source_track_id=record.get("source_track_id"),
        timbral=TimbralType(record["timbral"]),
        temporal=TemporalType(record["temporal"]),
        bpm=float(record["bpm"]),
        key=Key(int(record["key_tonic"]), record["key_mode"]),
        bar_length=int(record["bar_length"]),
        caption=record["caption"],
        embedding=tuple(float(v) for v in record["embedding"]),
        audio_ref=record["audio_ref"],
        created_at=float(record["created_at"]),
    )


def block_to_record(block: Block) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "block_id": block.block_id,
        "creator_id": block.creator_id,
        "source_track_id": block.source_track_id,
        "timbral": block.timbral.value,
        "temporal": block.temporal.value,
        "bpm": block.bpm,
        "key_tonic": block.key.tonic,
        "key_mode": block.key.mode,
        "bar_length": block.bar_length,
        "caption": block.caption,
        "embedding": list(block.embedding),
        "audio_ref": block.audio_ref,
        "created_at": block.created_at,
    }


class BlockCatalog:
    """In-memory index over blocks, optionally mirrored to disk."""

    def __init__(
        self,
        root: str | Path | None = None,
        clock: Callable[[], float] = time.time,
        score_weights: Mapping[str, float] | None = None,
    ):
        self._root = Path(root) if root is not None else None
        self._clock = clock
        self._weights = dict(score_weights or DEFAULT_SCORE_WEIGHTS)
        self._write_lock = threading.Lock()
        self._blocks: tuple[Block, ...] = ()
        self._by_id: dict[str, Block] = {}
        self._audio_cache: dict[str, AudioBuffer] = {}
        self._counter = 0
        self._track_counter = 0
        if self._root is not None:
            self._root.mkdir(parents=True, exist_ok=True)
            (self._root / "audio").mkdir(exist_ok=True)
            self._load()

    # -- loading / persistence -------------------------------------------

    def _load(self) -> None:
        index = self._root / "blocks.jsonl"
        if not index.exists():
            return
        raw = index.read_text(encoding="utf-8")
        lines = raw.split("\n")
        complete, torn = lines[:-1], lines[-1]
        blocks = []
        for position, line in enumerate(complete):
            try:
                blocks.append(record_to_block(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"catalog index corrupt at line {position + 1}") from exc
        if torn:
            # a crash mid-append leaves a partial trailing line; drop it
            keep = sum(len(line) + 1 for line in complete)
            with open(index, "r+", encoding="utf-8") as fh:
                fh.truncate(keep)
        self._blocks = tuple(blocks)
        self._by_id = {b.block_id: b for b in blocks}
        self._counter = len(blocks)
        self._track_counter = len(
            {b.source_track_id for b in blocks if b.source_track_id}
        )

    def _persist(self, added: Sequence[tuple[Block, AudioBuffer]]) -> None:
        if self._root is None:
            return
        for block, audio in added:
            (self._root / block.audio_ref).write_bytes(save_wav(audio))
        index = self._root / "blocks.jsonl"
        with open(index, "a", encoding="utf-8") as fh:
            for block, _ in added:
                fh.write(json.dumps(block_to_record(block)) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def _commit(self, pairs: list[tuple[Block, AudioBuffer]]) -> None:
        self._persist(pairs)
        for block, audio in pairs:
            self._by_id[block.block_id] = block
            self._audio_cache[block.block_id] = audio
        self._blocks = self._blocks + tuple(b for b, _ in pairs)

    def _next_block_id(self) -> str:
        self._counter += 1
        return f"b{self._counter:06d}"

    def _next_track_id(self) -> str:
        self._track_counter += 1
        return f"t{self._track_counter:04d}"

    # -- ingestion ---------------------------------------------------------

    def _build_block(
        self,
        audio: AudioBuffer,
        timbral: TimbralType,
        temporal: TemporalType,
        creator_id: str,
        caption: str,
        bpm: float,
        key: Key,
        source_track_id: str | None,
    ) -> tuple[Block, AudioBuffer]:
        aligned, bars = bar_aligned(audio, bpm)
        block_id = self._next_block_id()
        block = Block(
            block_id=block_id,
            creator_id=creator_id,
            source_track_id=source_track_id,
            timbral=timbral,
            temporal=temporal,
            bpm=bpm,
            key=key,
            bar_length=bars,
            caption=caption,
            embedding=embed_block(aligned, caption, bpm),
            audio_ref=f"audio/{block_id}.wav",
            created_at=self._clock(),
        )
        return block, aligned

    def ingest_stem(
        self,
        audio: AudioBuffer,
        timbral: TimbralType,
        temporal: TemporalType,
        creator_id: str,
        caption: str,
        bpm: float | None = None,
        key: Key | None = None,
    ) -> Block:
        """Index one standalone stem; missing bpm/key are filled by analysis."""
        if audio.frame_count == 0:
            raise EmptyAudio("stem audio is empty")
        if not creator_id:
            raise MissingCreator("creator_id is required")
        if bpm is None:
            bpm = (
                estimate_tempo(audio)
                if audio.duration_seconds >= 2.0
                else _FALLBACK_BPM
            )
        if key is None:
            key = estimate_key(audio)
        with self._write_lock:
            pair = self._build_block(
                audio, timbral, temporal, creator_id, caption, bpm, key, None
            )
            self._commit([pair])
        return pair[0]

    def ingest_track(
        self,
        audio: AudioBuffer,
        creator_id: str,
        title: str,
        stems: Mapping[TimbralType, AudioBuffer] | None = None,
        section_markers: Sequence[tuple[float, float, TemporalType]] | None = None,
        captions: Mapping[TimbralType, str] | None = None,
    ) -> list[Block]:
        """Decompose a submitted track into one block per stem x section.

        Without explicit stems, the track is band-split and the three bands
        stand in for bass/chords/melody stems.  Without markers, sections
        come from the structure analyzer.  All resulting blocks share a
        generated source_track_id.
        """
        if audio.frame_count == 0:
            raise EmptyAudio("track audio is empty")
        if not creator_id:
            raise MissingCreator("creator_id is required")

        if stems:
            stem_items = sorted(stems.items(), key=lambda kv: kv[0].value)
        else:
            low, mid, high = band_split(audio)
            stem_items = list(zip(BAND_TIMBRAL_MAP, (low, mid, high)))

        if section_markers:
            sections = [(s, e, t) for s, e, t in section_markers]
        else:
            try:
                raw = segment_structure(audio)
            except Exception as exc:
                raise SegmentationFailed(str(exc)) from exc
            sections = [
                (s, e, _SECTION_LABEL_MAP.get(label, TemporalType.VERSE))
                for s, e, label in raw
            ]

        bpm = (
            estimate_tempo(audio) if audio.duration_seconds >= 2.0 else _FALLBACK_BPM
        )

        with self._write_lock:
            track_id = self._next_track_id()
            pairs = []
            for timbral, stem_audio in stem_items:
                for start_s, end_s, temporal in sections:
                    a = int(round(start_s * stem_audio.sample_rate))
                    b = int(round(end_s * stem_audio.sample_rate))
                    slice_audio = AudioBuffer(
                        stem_audio.samples[a:b], stem_audio.sample_rate
                    )
                    if slice_audio.frame_count == 0:
                        continue
                    base = (captions or {}).get(timbral, title)
                    caption = f"{base} {timbral.value} {temporal.value}"
                    pairs.append(
                        self._build_block(
                            slice_audio,
                            timbral,
                            temporal,
                            creator_id,
                            caption,
                            bpm,
                            estimate_key(slice_audio),
                            track_id,
                        )
                    )
            self._commit(pairs)
        return [b for b, _ in pairs]

    def add_block(self, block: Block, audio: AudioBuffer) -> None:
        """Insert a fully-formed block (loader and test seam)."""
        with self._write_lock:
            if block.block_id in self._by_id:
                raise ValueError(f"duplicate block_id {block.block_id}")
            self._commit([(block, audio)])
            self._counter = max(self._counter, len(self._blocks))

    # -- retrieval ---------------------------------------------------------

    def query(self, q: BlockQuery) -> list[RetrievalResult]:
        """Hard-filter then score survivors; top ``limit`` by score desc.

        Score = w_text * cosine(text) + w_bpm * proximity + w_key *
        compatibility; criteria absent from the query contribute 1.0.
        Ties break by block_id ascending.
        """
        snapshot = self._blocks
        query_vec = embed_text(q.text) if q.text is not None else None
        scored: list[RetrievalResult] = []
        for block in snapshot:
            if q.timbral is not None and block.timbral != q.timbral:
                continue
            if q.temporal is not None and block.temporal != q.temporal:
                continue
            if q.creator_id is not None and block.creator_id != q.creator_id:
                continue
            bpm_prox = 1.0
            if q.bpm_center is not None:
                delta = abs(block.bpm - q.bpm_center)
                if delta > q.bpm_tolerance:
                    continue
                bpm_prox = max(0.0, 1.0 - delta / q.bpm_tolerance)
            key_compat = 1.0
            if q.key is not None:
                key_compat = key_compatibility(q.key, block.key)
                if key_compat < q.min_key_compatibility:
                    continue
            text_sim = (
                text_similarity(query_vec, block.embedding)
                if query_vec is not None
                else 1.0
            )
            score = (
                self._weights["text"] * text_sim
                + self._weights["bpm"] * bpm_prox
                + self._weights["key"] * key_compat
            )
            scored.append(
                RetrievalResult(
                    block_id=block.block_id,
                    score=score,
                    breakdown=ScoreBreakdown(text_sim, bpm_prox, key_compat),
                )
            )
        scored.sort(key=lambda r: (-r.score, r.block_id))
        return scored[: q.limit]

    # -- lookups -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self._blocks)

    def get_block(self, block_id: str) -> Block:
        block = self._by_id.get(block_id)
        if block is None:
            raise UnknownBlock(f"no such block: {block_id}")
        return block

    def has_block(self, block_id: str) -> bool:
        return block_id in self._by_id

    def get_audio(self, block_id: str) -> AudioBuffer:
        block = self.get_block(block_id)
        cached = self._audio_cache.get(block_id)
        if cached is not None:
            return cached
        if self._root is None:
            raise UnknownBlock(f"audio for {block_id} not available")
        audio = load_wav((self._root / block.audio_ref).read_bytes())
        self._audio_cache[block_id] = audio
        return audio

    def list_by_creator(self, creator_id: str) -> list[Block]:
        blocks = [b for b in self._blocks if b.creator_id == creator_id]
        blocks.sort(key=lambda b: (b.created_at, b.block_id))
        return blocks

    def all_blocks(self) -> tuple[Block, ...]:
        return self._blocks
