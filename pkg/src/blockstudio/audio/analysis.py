"""Deterministic signal analysis: pitch, tempo, summary features, structure.

Pitch uses a Hann-windowed normalized autocorrelation compensated by the
window's own autocorrelation, which keeps the peak at the true period even
for frames spanning only a couple of cycles.  Tempo scores candidate beat
periods with a harmonic comb over the onset-strength autocorrelation and
folds octaves into [60, 180] BPM.
"""
from __future__ import annotations

import numpy as np

from ..errors import (
    EmptyBuffer,
    NonMonoInput,
    TooShortForSegmentation,
    TooShortForTempo,
)
from .buffer import AudioBuffer, AudioFeatures

PITCH_FMIN = 50.0
PITCH_FMAX = 1000.0
VOICING_THRESHOLD = 0.5

TEMPO_MIN_BPM = 60.0
TEMPO_MAX_BPM = 180.0
_TEMPO_ENVELOPE_RATE = 172.0  # target onset-envelope frames per second

SEGMENT_WINDOW_S = 1.0
SEGMENT_HOP_S = 0.25
SEGMENT_EDGE_FRACTION = 0.15
SEGMENT_MIN_DURATION_S = 4.0

_FFT_FRAME = 2048


def _autocorr(x: np.ndarray, n_keep: int) -> np.ndarray:
    n = len(x)
    nfft = 1
    while nfft < 2 * n:
        nfft *= 2
    spec = np.fft.rfft(x, nfft)
    return np.fft.irfft(spec * np.conj(spec), nfft)[:n_keep]


def _parabolic(ym1: float, y0: float, yp1: float) -> float:
    """Sub-sample offset of a parabola's vertex through three points."""
    denom = ym1 - 2.0 * y0 + yp1
    if abs(denom) < 1e-12:
        return 0.0
    delta = 0.5 * (ym1 - yp1) / denom
    return delta if -1.0 < delta < 1.0 else 0.0


def _frame_f0(
    frame: np.ndarray,
    sample_rate: int,
    fmin: float = PITCH_FMIN,
    fmax: float = PITCH_FMAX,
    threshold: float = VOICING_THRESHOLD,
) -> float | None:
    n = len(frame)
    lag_min = max(2, int(np.floor(sample_rate / fmax)))
    lag_max = min(n - 2, int(np.ceil(sample_rate / fmin)))
    if lag_min >= lag_max:
        return None
    window = np.hanning(n)
    r = _autocorr(frame * window, lag_max + 2)
    if r[0] <= 1e-12:
        return None
    rw = _autocorr(window, lag_max + 2)
    # dividing out the window autocorr makes nac ~ cos(2*pi*f0*lag) for a sine
    nac = (r / r[0]) * (rw[0] / np.maximum(rw, rw[0] * 1e-3))

    seg = nac[lag_min - 1 : lag_max + 2]
    rising = seg[1:-1] > seg[:-2]
    falling = seg[1:-1] >= seg[2:]
    peaks = np.nonzero(rising & falling)[0] + lag_min
    if len(peaks) == 0:
        return None
    vmax = float(np.max(nac[peaks]))
    if vmax < threshold:
        return None
    # smallest qualifying lag avoids octave-down picks among near-equal peaks
    best = int(peaks[np.argmax(nac[peaks] >= 0.95 * vmax)])
    lag = best + _parabolic(nac[best - 1], nac[best], nac[best + 1])
    return sample_rate / lag


def detect_pitch(
    buffer: AudioBuffer, frame_ms: float = 40.0, hop_ms: float = 10.0
) -> list[tuple[float, float | None]]:
    """Per-frame fundamental estimates: (frame start seconds, f0 or None).

    Frames whose normalized-autocorrelation peak falls below 0.5 are
    reported unvoiced (None).  Requires mono input and frame_ms >= 20.
    """
    if buffer.channels != 1:
        raise NonMonoInput("pitch detection needs mono input")
    if frame_ms < 20:
        raise ValueError("frame_ms must be >= 20")
    x = buffer.mono()
    frame = int(buffer.sample_rate * frame_ms / 1000.0)
    hop = max(1, int(buffer.sample_rate * hop_ms / 1000.0))
    out: list[tuple[float, float | None]] = []
    for start in range(0, max(1, len(x) - frame + 1), hop):
        chunk = x[start : start + frame]
        if len(chunk) < frame:
            break
        out.append((start / buffer.sample_rate, _frame_f0(chunk, buffer.sample_rate)))
    if not out and len(x):
        out.append((0.0, _frame_f0(x, buffer.sample_rate)))
    return out


def estimate_tempo(buffer: AudioBuffer) -> float:
    """Tempo in [60, 180] BPM from onset-strength autocorrelation.

    The onset envelope is the half-wave rectified frame-energy difference.
    Candidate lags are scored with a harmonic comb (k = 1..4, weights 1/k);
    out-of-range results are octave-folded into the range.
    """
    if buffer.duration_seconds < 2.0:
        raise TooShortForTempo(
            f"need >= 2 s of audio, got {buffer.duration_seconds:.2f} s"
        )
    x = buffer.mono()
    sr = buffer.sample_rate
    hop = max(32, int(round(sr / _TEMPO_ENVELOPE_RATE)))
    n_frames = len(x) // hop
    energy = np.sum(x[: n_frames * hop].reshape(n_frames, hop) ** 2, axis=1)
    onset = np.maximum(np.diff(energy), 0.0)
    if len(onset) < 8 or np.max(onset) <= 0.0:
        return 120.0  # featureless signal: neutral default
    win = np.hanning(7)
    onset = np.convolve(onset, win / win.sum(), mode="same")
    onset /= np.max(onset)

    env_rate = sr / hop
    n = len(onset)
    ac = _autocorr(onset, n)
    lag_min = max(2, int(np.floor(env_rate * 60.0 / TEMPO_MAX_BPM)))
    lag_max = min(n - 2, int(np.ceil(env_rate * 60.0 / TEMPO_MIN_BPM)))
    if lag_min >= lag_max:
        return 120.0

    best_score = -np.inf
    best_peak = lag_min
    for lag in range(lag_min, lag_max + 1):
        score = 0.0
        first_peak = lag
        for k in (1, 2, 3, 4):
            center = k * lag
            half = (k + 1) // 2 + 1  # tolerate fractional-bin drift at multiples
            w0, w1 = max(1, center - half), min(n, center + half + 1)
            if w0 >= n - 1:
                break
            local = int(w0 + np.argmax(ac[w0:w1]))
            score += ac[local] / k
            if k == 1:
                first_peak = local
        if score > best_score:
            best_score, best_peak = score, first_peak

    lag = float(best_peak)
    if 1 <= best_peak < n - 1:
        lag += _parabolic(ac[best_peak - 1], ac[best_peak], ac[best_peak + 1])
    bpm = 60.0 * env_rate / lag
    while bpm < TEMPO_MIN_BPM / 1.01:
        bpm *= 2.0
    while bpm > TEMPO_MAX_BPM * 1.01:
        bpm /= 2.0
    return float(min(max(bpm, TEMPO_MIN_BPM), TEMPO_MAX_BPM))


def extract_features(buffer: AudioBuffer) -> AudioFeatures:
    """RMS, spectral centroid (Hann 2048 frames, averaged spectra), ZCR, BPM."""
    if buffer.frame_count == 0:
        raise EmptyBuffer("cannot extract features from an empty buffer")
    x = buffer.mono()
    sr = buffer.sample_rate

    rms = float(np.sqrt(np.mean(x**2)))

    window = np.hanning(_FFT_FRAME)
    freqs = np.fft.rfftfreq(_FFT_FRAME, 1.0 / sr)
    spectrum_sum = np.zeros(len(freqs))
    count = 0
    for start in range(0, max(1, len(x) - _FFT_FRAME + 1), _FFT_FRAME):
        chunk = x[start : start + _FFT_FRAME]
        if len(chunk) < _FFT_FRAME:
            chunk = np.pad(chunk, (0, _FFT_FRAME - len(chunk)))
        spectrum_sum += np.abs(np.fft.rfft(chunk * window))
        count += 1
    if count == 0:
        chunk = np.pad(x, (0, _FFT_FRAME - len(x)))
        spectrum_sum = np.abs(np.fft.rfft(chunk * window))
    total = float(np.sum(spectrum_sum))
    centroid = float(np.sum(spectrum_sum * freqs) / total) if total > 1e-12 else 0.0

    signs = np.signbit(x)
    crossings = int(np.sum(signs[1:] != signs[:-1]))
    zcr = crossings / buffer.duration_seconds if buffer.duration_seconds > 0 else 0.0

    bpm: float | None = None
    if buffer.duration_seconds >= 2.0 and rms > 0.0:
        bpm = estimate_tempo(buffer)

    return AudioFeatures(
        rms=rms,
        spectral_centroid_hz=centroid,
        zero_crossing_rate=zcr,
        estimated_bpm=bpm,
    )


def _window_rms(x: np.ndarray, start: int, size: int) -> float:
    chunk = x[start : start + size]
    if len(chunk) == 0:
        return 0.0
    return float(np.sqrt(np.mean(chunk**2)))


def segment_structure(buffer: AudioBuffer) -> list[tuple[float, float, str]]:
    """Split into contiguous labeled sections covering [0, duration].

    Boundaries sit at peaks of the RMS-novelty curve (adjacent 1 s windows
    compared every 0.25 s) that exceed mean + 1 std.  Labels: the loudest
    segment is the chorus (when more than one segment exists), short first
    and last segments become intro/outro, everything else is a verse.
    """
    duration = buffer.duration_seconds
    if duration < SEGMENT_MIN_DURATION_S:
        raise TooShortForSegmentation(f"need >= 4 s of audio, got {duration:.2f} s")
    x = buffer.mono()
    sr = buffer.sample_rate
    win = int(SEGMENT_WINDOW_S * sr)
    hop = max(1, int(SEGMENT_HOP_S * sr))

    times: list[float] = []
    novelty: list[float] = []
    t = win
    while t + win <= len(x):
        left = _window_rms(x, t - win, win)
        right = _window_rms(x, t, win)
        times.append(t / sr)
        novelty.append(abs(right - left))
        t += hop
    boundaries: list[float] = []
    if novelty:
        nov = np.array(novelty)
        threshold = float(np.mean(nov) + np.std(nov))
        order = np.argsort(nov)[::-1]
        chosen: list[int] = []
        for idx in order:
            if nov[idx] <= threshold or nov[idx] <= 0.0:
                break
            if all(abs(times[idx] - times[j]) >= 1.0 for j in chosen):
                chosen.append(int(idx))
        boundaries = sorted(times[i] for i in chosen)

    edges = [0.0] + boundaries + [duration]
    spans = [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]
    return [
        (start, end, label)
        for (start, end), label in zip(spans, _label_segments(x, sr, spans, duration))
    ]


def _label_segments(
    x: np.ndarray, sr: int, spans: list[tuple[float, float]], duration: float
) -> list[str]:
    if len(spans) == 1:
        return ["verse"]
    mean_rms = [
        _window_rms(x, int(s * sr), max(1, int((e - s) * sr))) for s, e in spans
    ]
    chorus = int(np.argmax(mean_rms))
    labels = []
    for i, (s, e) in enumerate(spans):
        if i == chorus:
            labels.append("chorus")
        elif i == 0 and (e - s) < SEGMENT_EDGE_FRACTION * duration:
            labels.append("intro")
        elif i == len(spans) - 1 and (e - s) < SEGMENT_EDGE_FRACTION * duration:
            labels.append("outro")
        else:
            labels.append("verse")
    return labels
