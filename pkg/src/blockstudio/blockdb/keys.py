"""Key estimation and key compatibility scoring."""
from __future__ import annotations

import numpy as np

from ..audio.analysis import detect_pitch
from ..audio.buffer import MODE_MAJOR, MODE_MINOR, AudioBuffer, Key, hz_to_midi

MAJOR_SCALE = (0, 2, 4, 5, 7, 9, 11)
MINOR_SCALE = (0, 2, 3, 5, 7, 8, 10)

# tonic weight breaks the tie between relative major/minor pairs, which share
# the same pitch-class set
_TONIC_BONUS = 0.5


def pitch_class_histogram(audio: AudioBuffer) -> np.ndarray:
    """Counts of voiced frames per pitch class 0-11."""
    mono = AudioBuffer(audio.mono(), audio.sample_rate)
    hist = np.zeros(12, dtype=np.float64)
    frame_ms = 40.0
    if mono.duration_seconds * 1000.0 < frame_ms:
        frame_ms = max(20.0, mono.duration_seconds * 1000.0)
    if mono.duration_seconds * 1000.0 < 20.0:
        return hist
    for _, f0 in detect_pitch(mono, frame_ms=frame_ms):
        if f0:
            hist[int(round(hz_to_midi(f0))) % 12] += 1.0
    return hist


def estimate_key_from_histogram(hist: np.ndarray) -> Key:
    """Best of the 24 major/minor keys by in-scale mass plus a tonic bonus.

    Ties break toward the lower tonic, then major.  An empty histogram
    (nothing voiced) falls back to C major.
    """
    if float(np.sum(hist)) <= 0.0:
        return Key(0, MODE_MAJOR)
    best: tuple[float, int, int] | None = None  # (-score, tonic, minor_flag)
    best_key = Key(0, MODE_MAJOR)
    for tonic in range(12):
        for mode, scale in ((MODE_MAJOR, MAJOR_SCALE), (MODE_MINOR, MINOR_SCALE)):
            score = sum(hist[(tonic + step) % 12] for step in scale)
            score += _TONIC_BONUS * hist[tonic]
            rank = (-score, tonic, 1 if mode == MODE_MINOR else 0)
            if best is None or rank < best:
                best = rank
                best_key = Key(tonic, mode)
    return best_key


def estimate_key(audio: AudioBuffer) -> Key:
    return estimate_key_from_histogram(pitch_class_histogram(audio))


_CIRCLE_POSITION = {tonic: (7 * tonic) % 12 for tonic in range(12)}


def circle_of_fifths_distance(tonic_a: int, tonic_b: int) -> int:
    """Steps around the circle of fifths between two tonics, 0-6."""
    d = (_CIRCLE_POSITION[tonic_a] - _CIRCLE_POSITION[tonic_b]) % 12
    return min(d, 12 - d)


def key_compatibility(a: Key, b: Key) -> float:
    """Symmetric compatibility in [0, 1].

    1.0 for identical keys, 0.9 for a relative major/minor pair, otherwise
    1 - 0.2 * circle-of-fifths distance after mapping minor keys to their
    relative majors (floored at 0).
    """
    if a == b:
        return 1.0
    if a.mode != b.mode and a.relative_major_tonic() == b.relative_major_tonic():
        return 0.9
    dist = circle_of_fifths_distance(a.relative_major_tonic(), b.relative_major_tonic())
    return max(0.0, 1.0 - 0.2 * dist)
