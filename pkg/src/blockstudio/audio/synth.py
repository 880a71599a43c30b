"""Symbolic-to-audio rendering with basic oscillators or a sampled timbre."""
from __future__ import annotations

import numpy as np

from ..errors import EmptyTrack, UnpitchedTimbrePrototype
from .analysis import detect_pitch
from .buffer import AudioBuffer, SymbolicTrack, midi_to_hz
from .ops import loop_to_length, resample_linear

OSCILLATORS = ("sine", "saw", "square")
FADE_S = 0.010
_NOTE_LEVEL = 0.8


def _oscillator(kind: str, freq: float, frames: int, sample_rate: int) -> np.ndarray:
    t = np.arange(frames, dtype=np.float64) / sample_rate
    phase = freq * t
    if kind == "sine":
        return np.sin(2.0 * np.pi * phase)
    if kind == "saw":
        return 2.0 * (phase - np.floor(phase + 0.5))
    if kind == "square":
        return np.where((phase - np.floor(phase)) < 0.5, 1.0, -1.0)
    raise ValueError(f"unknown oscillator: {kind}")


def detect_root_pitch(prototype: AudioBuffer) -> float:
    """Median voiced f0 of a one-shot sample; raises if nothing is pitched."""
    mono = AudioBuffer(prototype.mono(), prototype.sample_rate)
    frame_ms = 40.0
    if mono.duration_seconds * 1000.0 < frame_ms:
        frame_ms = max(20.0, mono.duration_seconds * 1000.0)
    voiced = [f0 for _, f0 in detect_pitch(mono, frame_ms=frame_ms) if f0]
    if not voiced:
        raise UnpitchedTimbrePrototype("prototype sample has no voiced frames")
    return float(np.median(voiced))


def _fade(note: np.ndarray, sample_rate: int) -> np.ndarray:
    fade = min(int(FADE_S * sample_rate), len(note) // 2)
    if fade > 0:
        ramp = np.linspace(0.0, 1.0, fade, endpoint=False)
        note[:fade] *= ramp
        note[-fade:] *= ramp[::-1]
    return note


def render_symbolic(
    track: SymbolicTrack,
    timbre: AudioBuffer | str = "sine",
    sample_rate: int = 44100,
) -> AudioBuffer:
    """Render notes at onset*(60/bpm) seconds with 10 ms fades, summed, clipped.

    ``timbre`` is either an oscillator name ("sine", "saw", "square") or a
    prototype one-shot buffer that gets resampled by the ratio of the target
    note frequency to its detected root pitch.
    """
    if len(track.notes) == 0:
        raise EmptyTrack("nothing to render")
    if isinstance(timbre, str):
        if timbre not in OSCILLATORS:
            raise ValueError(f"unknown oscillator: {timbre}")
        prototype = None
        root = None
    else:
        prototype = AudioBuffer(timbre.mono(), timbre.sample_rate)
        root = detect_root_pitch(prototype)
        sample_rate = prototype.sample_rate

    spb = 60.0 / track.bpm
    total_s = track.total_beats() * spb
    out = np.zeros(int(round(total_s * sample_rate)) + 1, dtype=np.float64)
    for note in track.notes:
        start = int(round(note.onset_beats * spb * sample_rate))
        frames = max(1, int(round(note.duration_beats * spb * sample_rate)))
        freq = midi_to_hz(note.pitch)
        if prototype is None:
            wave = _oscillator(str(timbre), freq, frames, sample_rate)
        else:
            shifted = resample_linear(prototype, freq / root)
            wave = loop_to_length(shifted, frames).samples[:, 0].astype(np.float64)
        wave = _fade(wave * (_NOTE_LEVEL * note.velocity / 127.0), sample_rate)
        end = min(len(out), start + frames)
        out[start:end] += wave[: end - start]
    return AudioBuffer(out, sample_rate)


def transpose(track: SymbolicTrack, target) -> SymbolicTrack:
    """Shift all pitches by the tonic delta into the target key (mode kept).

    The delta is taken modulo an octave and mapped into [-6, +6] semitones so
    melodies move to the nearest matching register.
    """
    delta = (target.tonic - track.key.tonic + 6) % 12 - 6
    if delta == 0:
        return track
    notes = tuple(
        type(n)(
            pitch=min(127, max(0, n.pitch + delta)),
            onset_beats=n.onset_beats,
            duration_beats=n.duration_beats,
            velocity=n.velocity,
        )
        for n in track.notes
    )
    return SymbolicTrack(notes=notes, bpm=track.bpm, key=target)
