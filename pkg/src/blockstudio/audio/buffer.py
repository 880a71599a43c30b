"""Core signal and symbolic-music value types.

The canonical in-memory format is 32-bit float, samples clipped to [-1, 1]
on construction, shaped (frames, channels) with 1 or 2 channels.  Analysis
operations work on a mono downmix (L+R)/2.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MODE_MAJOR = "major"
MODE_MINOR = "minor"

PITCH_CLASS_NAMES = ("C", "C#", "D", "D#", "E", "F", "F#", "G", "G#", "A", "A#", "B")


class AudioBuffer:
    """Immutable-by-convention PCM audio: float32 in [-1, 1], 1-2 channels."""

    __slots__ = ("samples", "sample_rate")

    def __init__(self, samples: np.ndarray, sample_rate: int):
        if sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        arr = np.asarray(samples, dtype=np.float32)
        if arr.ndim == 1:
            arr = arr[:, np.newaxis]
        if arr.ndim != 2 or arr.shape[1] not in (1, 2):
            raise ValueError("samples must be (frames,) or (frames, 1|2)")
        self.samples = np.clip(arr, -1.0, 1.0)
        self.sample_rate = int(sample_rate)

    @property
    def channels(self) -> int:
        return self.samples.shape[1]

    @property
    def frame_count(self) -> int:
        return self.samples.shape[0]

    @property
    def duration_seconds(self) -> float:
        return self.frame_count / self.sample_rate

    def mono(self) -> np.ndarray:
        """Mono downmix as float64, shape (frames,)."""
        if self.channels == 1:
            return self.samples[:, 0].astype(np.float64)
        return self.samples.mean(axis=1, dtype=np.float64)

    def with_channels(self, channels: int) -> "AudioBuffer":
        """Up- or downmix to the requested channel count."""
        if channels == self.channels:
            return self
        if channels == 1:
            return AudioBuffer(self.mono(), self.sample_rate)
        return AudioBuffer(np.repeat(self.samples, 2, axis=1), self.sample_rate)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AudioBuffer):
            return NotImplemented
        return (
            self.sample_rate == other.sample_rate
            and self.samples.shape == other.samples.shape
            and bool(np.array_equal(self.samples, other.samples))
        )

    def __repr__(self) -> str:
        return (
            f"AudioBuffer({self.frame_count} frames, {self.sample_rate} Hz, "
            f"{self.channels} ch)"
        )

    @classmethod
    def silence(cls, seconds: float, sample_rate: int, channels: int = 1) -> "AudioBuffer":
        frames = int(round(seconds * sample_rate))
        return cls(np.zeros((frames, channels), dtype=np.float32), sample_rate)


@dataclass(frozen=True, order=True)
class Key:
    """Musical key: tonic pitch class 0-11 (0 = C) and major/minor mode."""

    tonic: int
    mode: str = MODE_MAJOR

    def __post_init__(self):
        if not 0 <= self.tonic <= 11:
            raise ValueError(f"tonic out of range: {self.tonic}")
        if self.mode not in (MODE_MAJOR, MODE_MINOR):
            raise ValueError(f"unknown mode: {self.mode}")

    @property
    def is_minor(self) -> bool:
        return self.mode == MODE_MINOR

    def relative_major_tonic(self) -> int:
        """Tonic of the relative major (identity for major keys)."""
        return (self.tonic + 3) % 12 if self.is_minor else self.tonic

    def name(self) -> str:
        suffix = "min" if self.is_minor else "maj"
        return f"{PITCH_CLASS_NAMES[self.tonic]}{suffix}"

    @classmethod
    def parse(cls, text: str) -> "Key":
        """Parse literals like ``C``, ``Amin``, ``F#maj``, ``Ebmin``."""
        s = text.strip()
        if not s:
            raise ValueError("empty key literal")
        letter = s[0].upper()
        base = {"C": 0, "D": 2, "E": 4, "F": 5, "G": 7, "A": 9, "B": 11}.get(letter)
        if base is None:
            raise ValueError(f"bad key literal: {text!r}")
        rest = s[1:]
        if rest.startswith("#"):
            base = (base + 1) % 12
            rest = rest[1:]
        elif rest.startswith("b"):
            base = (base - 1) % 12
            rest = rest[1:]
        mode = MODE_MAJOR
        if rest.lower() in ("min", "minor", "m"):
            mode = MODE_MINOR
        elif rest.lower() in ("", "maj", "major"):
            mode = MODE_MAJOR
        else:
            raise ValueError(f"bad key literal: {text!r}")
        return cls(base, mode)


@dataclass(frozen=True)
class NoteEvent:
    """One note: MIDI pitch, onset/duration in beats, velocity 1-127."""

    pitch: int
    onset_beats: float
    duration_beats: float
    velocity: int = 100

    def __post_init__(self):
        if not 0 <= self.pitch <= 127:
            raise ValueError(f"pitch out of range: {self.pitch}")
        if self.onset_beats < 0:
            raise ValueError("onset_beats must be non-negative")
        if self.duration_beats <= 0:
            raise ValueError("duration_beats must be positive")
        if not 1 <= self.velocity <= 127:
            raise ValueError(f"velocity out of range: {self.velocity}")


@dataclass(frozen=True)
class SymbolicTrack:
    """Monophonic-or-polyphonic note list with tempo and key context.

    Notes are stored sorted by onset, ties broken by pitch ascending.
    """

    notes: tuple[NoteEvent, ...]
    bpm: float
    key: Key = field(default_factory=lambda: Key(0, MODE_MAJOR))

    def __post_init__(self):
        if self.bpm <= 0:
            raise ValueError("bpm must be positive")
        ordered = tuple(sorted(self.notes, key=lambda n: (n.onset_beats, n.pitch)))
        object.__setattr__(self, "notes", ordered)

    def __len__(self) -> int:
        return len(self.notes)

    def total_beats(self) -> float:
        if not self.notes:
            return 0.0
        return max(n.onset_beats + n.duration_beats for n in self.notes)


@dataclass(frozen=True)
class AudioFeatures:
    """Deterministic summary features of a buffer."""

    rms: float
    spectral_centroid_hz: float
    zero_crossing_rate: float
    estimated_bpm: float | None = None


def midi_to_hz(pitch: float) -> float:
    return 440.0 * 2.0 ** ((pitch - 69) / 12.0)


def hz_to_midi(f0: float) -> float:
    return 69.0 + 12.0 * np.log2(f0 / 440.0)
