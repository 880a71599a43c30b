"""Three-way frequency band split at 200 Hz and 2000 Hz.

Implemented as a zero-phase spectral crossover: FFT masks with narrow
raised-cosine transitions (+-10% around each crossover) that partition
unity.  The three bands therefore sum back to the input exactly and, because
the transition regions are narrow, band energies add up to the input energy
within 1% for broadband material.
"""
from __future__ import annotations

import numpy as np

from ..errors import EmptyBuffer
from .buffer import AudioBuffer

LOW_CROSSOVER_HZ = 200.0
HIGH_CROSSOVER_HZ = 2000.0
_TRANSITION_FRACTION = 0.1


def _edge(freqs: np.ndarray, crossover: float) -> np.ndarray:
    """Raised-cosine step from 0 to 1 across the crossover's transition band."""
    half_width = crossover * _TRANSITION_FRACTION
    x = np.clip((freqs - (crossover - half_width)) / (2.0 * half_width), 0.0, 1.0)
    return 0.5 - 0.5 * np.cos(np.pi * x)


def band_split(buffer: AudioBuffer) -> tuple[AudioBuffer, AudioBuffer, AudioBuffer]:
    """Split into (low, mid, high) bands that sum exactly to the input."""
    if buffer.frame_count == 0:
        raise EmptyBuffer("cannot band-split an empty buffer")
    n = buffer.frame_count
    freqs = np.fft.rfftfreq(n, 1.0 / buffer.sample_rate)
    up_low = _edge(freqs, LOW_CROSSOVER_HZ)
    up_high = _edge(freqs, HIGH_CROSSOVER_HZ)
    mask_low = 1.0 - up_low
    mask_high = up_high
    mask_mid = up_low - up_high

    outs = []
    for mask in (mask_low, mask_mid, mask_high):
        out = np.empty((n, buffer.channels), dtype=np.float64)
        for ch in range(buffer.channels):
            spec = np.fft.rfft(buffer.samples[:, ch].astype(np.float64))
            out[:, ch] = np.fft.irfft(spec * mask, n)
        outs.append(AudioBuffer(out, buffer.sample_rate))
    return outs[0], outs[1], outs[2]
