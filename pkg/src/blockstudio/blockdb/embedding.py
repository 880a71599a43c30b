"""Deterministic embeddings: signed feature hashing for text plus a small
audio-feature tail.

No learned models: the 64-dim text part hashes lowercase alphanumeric tokens
with blake2b (bag of words, order-free), the 16-dim audio part tiles four
normalized scalars (rms, centroid, zcr, bpm) four times.  The concatenated
80-dim vector is L2-normalized as a whole.
"""
from __future__ import annotations

import hashlib
import re

import numpy as np

from ..audio.analysis import extract_features
from ..audio.buffer import AudioBuffer
from ..errors import EmptyAudio
from .model import AUDIO_DIM, TEXT_DIM

_TOKEN_SPLIT = re.compile(r"[^a-z0-9]+")


def _token_hash(token: str) -> int:
    return int.from_bytes(
        hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest(), "big"
    )


def embed_text(text: str) -> np.ndarray:
    """64-dim signed bag-of-words hash, unit norm (zero vector for no tokens)."""
    vec = np.zeros(TEXT_DIM, dtype=np.float64)
    for token in _TOKEN_SPLIT.split(text.lower()):
        if not token:
            continue
        h = _token_hash(token)
        sign = -1.0 if (h >> 6) & 1 else 1.0
        vec[h % TEXT_DIM] += sign
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return vec


def audio_feature_vector(audio: AudioBuffer, bpm: float) -> np.ndarray:
    """16-dim tail: (rms, centroid/5000, min(zcr/1000, 1), bpm/180) tiled x4,
    each clamped to [0, 1] before tiling."""
    feats = extract_features(audio)
    base = np.array(
        [
            min(max(feats.rms, 0.0), 1.0),
            min(max(feats.spectral_centroid_hz / 5000.0, 0.0), 1.0),
            min(max(feats.zero_crossing_rate / 1000.0, 0.0), 1.0),
            min(max(bpm / 180.0, 0.0), 1.0),
        ],
        dtype=np.float64,
    )
    return np.tile(base, AUDIO_DIM // 4)


def embed_block(audio: AudioBuffer, caption: str, bpm: float) -> tuple[float, ...]:
    """80-dim block embedding: text part ++ audio part, L2-normalized whole."""
    if audio.frame_count == 0:
        raise EmptyAudio("cannot embed empty audio")
    if bpm <= 0:
        raise ValueError("bpm must be positive")
    vec = np.concatenate([embed_text(caption), audio_feature_vector(audio, bpm)])
    norm = float(np.linalg.norm(vec))
    vec /= norm  # bpm > 0 guarantees a nonzero tail
    return tuple(float(v) for v in vec)


def text_similarity(query_vec: np.ndarray, embedding: tuple[float, ...]) -> float:
    """Cosine between a query text vector and the text part of an embedding,
    clamped to [0, 1]; degenerate vectors score 0."""
    part = np.asarray(embedding[:TEXT_DIM], dtype=np.float64)
    qn = float(np.linalg.norm(query_vec))
    pn = float(np.linalg.norm(part))
    if qn <= 0.0 or pn <= 0.0:
        return 0.0
    cos = float(np.dot(query_vec, part) / (qn * pn))
    return min(max(cos, 0.0), 1.0)
