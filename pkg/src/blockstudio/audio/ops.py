"""Buffer arithmetic: mixing, resampling, tempo conforming, looping."""
from __future__ import annotations

import numpy as np

from ..errors import EmptyMixInput, MixRateMismatch, NonPositiveBpm
from .buffer import AudioBuffer


def mix(layers: list[tuple[AudioBuffer, float]]) -> AudioBuffer:
    """Weighted per-sample sum, zero-padded to the longest layer, hard-clipped.

    All layers must share sample rate and channel count.
    """
    if not layers:
        raise EmptyMixInput("mix needs at least one layer")
    rate = layers[0][0].sample_rate
    channels = layers[0][0].channels
    for buf, _ in layers:
        if buf.sample_rate != rate:
            raise MixRateMismatch(
                f"sample rates differ: {buf.sample_rate} vs {rate}"
            )
        if buf.channels != channels:
            raise MixRateMismatch(f"channel counts differ: {buf.channels} vs {channels}")
    length = max(buf.frame_count for buf, _ in layers)
    acc = np.zeros((length, channels), dtype=np.float64)
    for buf, gain in layers:
        acc[: buf.frame_count] += buf.samples.astype(np.float64) * gain
    return AudioBuffer(acc, rate)


def scale(buffer: AudioBuffer, gain: float) -> AudioBuffer:
    return AudioBuffer(buffer.samples.astype(np.float64) * gain, buffer.sample_rate)


def resample_linear(buffer: AudioBuffer, factor: float) -> AudioBuffer:
    """Linear-interpolation playback-rate change.

    ``factor`` > 1 plays faster (shorter output, higher pitch).  Output
    length is round(frames / factor).
    """
    if factor <= 0:
        raise ValueError("factor must be positive")
    if factor == 1.0:
        return AudioBuffer(buffer.samples.copy(), buffer.sample_rate)
    n_in = buffer.frame_count
    n_out = max(1, int(round(n_in / factor))) if n_in else 0
    if n_in == 0:
        return AudioBuffer(np.zeros((0, buffer.channels)), buffer.sample_rate)
    src_pos = np.arange(n_out, dtype=np.float64) * factor
    src_pos = np.minimum(src_pos, n_in - 1)
    out = np.empty((n_out, buffer.channels), dtype=np.float64)
    base = np.arange(n_in, dtype=np.float64)
    for ch in range(buffer.channels):
        out[:, ch] = np.interp(src_pos, base, buffer.samples[:, ch].astype(np.float64))
    return AudioBuffer(out, buffer.sample_rate)


def conform_tempo(buffer: AudioBuffer, src_bpm: float, dst_bpm: float) -> AudioBuffer:
    """Resample so material at src_bpm plays at dst_bpm.

    Plain resampling: duration scales by src_bpm/dst_bpm and pitch shifts by
    the same ratio.  That side effect is accepted; this is not a time
    stretcher.
    """
    if src_bpm <= 0 or dst_bpm <= 0:
        raise NonPositiveBpm(f"bpm values must be positive: {src_bpm}, {dst_bpm}")
    if src_bpm == dst_bpm:
        return AudioBuffer(buffer.samples.copy(), buffer.sample_rate)
    return resample_linear(buffer, dst_bpm / src_bpm)


def conform_rate(buffer: AudioBuffer, sample_rate: int) -> AudioBuffer:
    """Linear resample onto a different sample rate."""
    if sample_rate == buffer.sample_rate:
        return buffer
    resampled = resample_linear(buffer, buffer.sample_rate / sample_rate)
    return AudioBuffer(resampled.samples, sample_rate)


def loop_to_length(buffer: AudioBuffer, frames: int) -> AudioBuffer:
    """Tile (or truncate) the buffer to exactly ``frames`` frames."""
    if frames <= 0:
        return AudioBuffer(np.zeros((0, buffer.channels)), buffer.sample_rate)
    if buffer.frame_count == 0:
        return AudioBuffer(np.zeros((frames, buffer.channels)), buffer.sample_rate)
    reps = -(-frames // buffer.frame_count)  # ceil
    tiled = np.tile(buffer.samples, (reps, 1))[:frames]
    return AudioBuffer(tiled, buffer.sample_rate)
