"""Synthetic test signals used across the suite."""
from __future__ import annotations

import numpy as np

from blockstudio.audio import AudioBuffer

SR = 44100


def sine(freq: float, seconds: float, amp: float = 0.5, sr: int = SR,
         phase: float = 0.0) -> AudioBuffer:
    t = np.arange(int(sr * seconds)) / sr
    return AudioBuffer(amp * np.sin(2 * np.pi * freq * t + phase), sr)


def square(freq: float, seconds: float, amp: float = 1.0, sr: int = SR) -> AudioBuffer:
    t = np.arange(int(sr * seconds)) / sr
    return AudioBuffer(amp * np.sign(np.sin(2 * np.pi * freq * t)), sr)


def white_noise(seconds: float, amp: float = 0.5, sr: int = SR, seed: int = 0) -> AudioBuffer:
    rng = np.random.default_rng(seed)
    return AudioBuffer(amp * rng.uniform(-1.0, 1.0, int(sr * seconds)), sr)


def silence(seconds: float, sr: int = SR) -> AudioBuffer:
    return AudioBuffer(np.zeros(int(sr * seconds)), sr)


def click_track(bpm: float, seconds: float = 8.0, sr: int = SR) -> AudioBuffer:
    """Decaying 1 kHz clicks on every beat."""
    x = np.zeros(int(sr * seconds))
    period = 60.0 / bpm
    n = int(0.005 * sr)
    env = np.exp(-np.arange(n) / (0.001 * sr))
    click = env * np.sin(2 * np.pi * 1000 * np.arange(n) / sr)
    t = 0.0
    while t < seconds:
        i = int(round(t * sr))
        end = min(len(x), i + n)
        if i < len(x):
            x[i:end] += click[: end - i]
        t += period
    return AudioBuffer(np.clip(x, -1, 1), sr)


def tone_sequence(freqs: list[float], note_seconds: float, amp: float = 0.5,
                  sr: int = SR) -> AudioBuffer:
    parts = [sine(f, note_seconds, amp, sr).samples[:, 0] for f in freqs]
    return AudioBuffer(np.concatenate(parts), sr)


def arpeggio(midi_pitches: list[int], note_seconds: float = 0.25, amp: float = 0.5,
             sr: int = SR, repeats: int = 4) -> AudioBuffer:
    freqs = [440.0 * 2 ** ((p - 69) / 12) for p in midi_pitches] * repeats
    return tone_sequence(freqs, note_seconds, amp, sr)


def fft_peak_hz(buffer: AudioBuffer) -> float:
    """Frequency of the strongest FFT bin (independent oracle)."""
    x = buffer.mono()
    spec = np.abs(np.fft.rfft(x * np.hanning(len(x))))
    freqs = np.fft.rfftfreq(len(x), 1.0 / buffer.sample_rate)
    i = int(np.argmax(spec))
    if 0 < i < len(spec) - 1:
        a, b, c = spec[i - 1], spec[i], spec[i + 1]
        denom = a - 2 * b + c
        if abs(denom) > 1e-12:
            i = i + 0.5 * (a - c) / denom
    return float(i * buffer.sample_rate / len(x))


def cents(f_measured: float, f_reference: float) -> float:
    return float(abs(1200.0 * np.log2(f_measured / f_reference)))
