"""Signal representations and deterministic DSP primitives."""

from .analysis import detect_pitch, estimate_tempo, extract_features, segment_structure
from .bands import band_split
from .buffer import (
    AudioBuffer,
    AudioFeatures,
    Key,
    NoteEvent,
    SymbolicTrack,
    hz_to_midi,
    midi_to_hz,
)
from .ops import conform_rate, conform_tempo, loop_to_length, mix, resample_linear, scale
from .synth import detect_root_pitch, render_symbolic, transpose
from .wav import load_wav, save_wav

__all__ = [
    "AudioBuffer",
    "AudioFeatures",
    "Key",
    "NoteEvent",
    "SymbolicTrack",
    "band_split",
    "conform_rate",
    "conform_tempo",
    "detect_pitch",
    "detect_root_pitch",
    "estimate_tempo",
    "extract_features",
    "hz_to_midi",
    "load_wav",
    "loop_to_length",
    "midi_to_hz",
    "mix",
    "render_symbolic",
    "resample_linear",
    "save_wav",
    "scale",
    "segment_structure",
    "transpose",
]
