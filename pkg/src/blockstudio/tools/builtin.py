"""The built-in tool set.

Six implemented tools (midi-transcription, stem-generation,
music-source-separation, music-structure-analysis, music-classification,
lyric-to-melody) plus four stubs that register real signatures but always
raise NotImplementedTool, so plans touching them fail loudly at a named
node.  All implementations are deterministic: same inputs, same bytes out.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..audio.analysis import detect_pitch, extract_features, segment_structure
from ..audio.bands import band_split
from ..audio.buffer import (
    AudioBuffer,
    Key,
    NoteEvent,
    SymbolicTrack,
    hz_to_midi,
)
from ..audio.ops import conform_rate, conform_tempo, loop_to_length
from ..audio.synth import render_symbolic, transpose
from ..blockdb.keys import MAJOR_SCALE, MINOR_SCALE, estimate_key_from_histogram
from ..blockdb.model import Block, TemporalType, TimbralType
from ..errors import (
    EmptyBuffer,
    NoSyllables,
    NotImplementedTool,
    NoVoicedContent,
    UnresolvableBlock,
)
from .registry import Modality, SlotSpec, ToolRegistry, ToolSpec

AudioResolver = Callable[[Block], AudioBuffer]

QUANT_GRID_BEATS = 0.25
MIN_NOTE_BEATS = 0.125
MERGE_CENTS = 50.0
_TRANSCRIBE_HOP_MS = 10.0
_DEFAULT_VELOCITY = 100

_BAND_STEM_MAP = (TimbralType.BASS, TimbralType.CHORDS, TimbralType.MELODY)

_SECTION_LABELS = {
    "intro": TemporalType.INTRO,
    "verse": TemporalType.VERSE,
    "chorus": TemporalType.CHORUS,
    "outro": TemporalType.OUTRO,
}

_VOWEL_GROUPS = re.compile(r"[aeiouy]+")


@dataclass(frozen=True)
class ClassifierThresholds:
    """Rule-cascade knobs for music-classification."""

    drums_zcr: float = 3000.0
    stable_pitch_ratio: float = 0.2
    bass_centroid: float = 300.0
    melody_centroid_low: float = 300.0
    melody_centroid_high: float = 2000.0
    melody_voiced_ratio: float = 0.6
    melody_pitch_std_semitones: float = 0.5


# ---------------------------------------------------------------------------
# midi-transcription
# ---------------------------------------------------------------------------

def _median3(values: list[float | None]) -> list[float | None]:
    out = list(values)
    for i in range(1, len(values) - 1):
        window = (values[i - 1], values[i], values[i + 1])
        if all(v is not None for v in window):
            out[i] = float(np.median([v for v in window]))
    return out


def _quantize(beats: float) -> float:
    return round(beats / QUANT_GRID_BEATS) * QUANT_GRID_BEATS


def tool_transcription(audio: AudioBuffer, bpm: float) -> SymbolicTrack:
    """Monophonic pitch track to quantized notes on a 1/4-beat grid."""
    if bpm <= 0:
        raise ValueError("bpm must be positive")
    mono = AudioBuffer(audio.mono(), audio.sample_rate)
    track = detect_pitch(mono, hop_ms=_TRANSCRIBE_HOP_MS)
    times = [t for t, _ in track]
    f0s = _median3([f for _, f in track])
    if not any(f0s):
        raise NoVoicedContent("no voiced frames to transcribe")

    hop_s = _TRANSCRIBE_HOP_MS / 1000.0
    segments: list[tuple[float, float, list[float]]] = []  # start, end, f0s
    current: list[float] = []
    start_t = 0.0
    last_t = 0.0
    for t, f0 in zip(times, f0s):
        if f0 is None:
            if current:
                segments.append((start_t, last_t + hop_s, current))
                current = []
            continue
        if current and abs(1200.0 * np.log2(f0 / current[-1])) > MERGE_CENTS:
            segments.append((start_t, last_t + hop_s, current))
            current = []
        if not current:
            start_t = t
        current.append(f0)
        last_t = t
    if current:
        segments.append((start_t, last_t + hop_s, current))

    beats_per_second = bpm / 60.0
    notes = []
    for seg_start, seg_end, seg_f0s in segments:
        onset = _quantize(seg_start * beats_per_second)
        duration = _quantize((seg_end - seg_start) * beats_per_second)
        if duration < MIN_NOTE_BEATS:
            continue
        pitch = int(round(hz_to_midi(float(np.median(seg_f0s)))))
        pitch = min(127, max(0, pitch))
        notes.append(
            NoteEvent(
                pitch=pitch,
                onset_beats=onset,
                duration_beats=duration,
                velocity=_DEFAULT_VELOCITY,
            )
        )
    if not notes:
        raise NoVoicedContent("no notes survived quantization")

    hist = np.zeros(12)
    for note in notes:
        hist[note.pitch % 12] += note.duration_beats
    return SymbolicTrack(
        notes=tuple(notes), bpm=bpm, key=estimate_key_from_histogram(hist)
    )


# ---------------------------------------------------------------------------
# stem-generation
# ---------------------------------------------------------------------------

def make_stem_generation(resolver: AudioResolver | None):
    def tool_stem_generation(
        prompt: Block | AudioBuffer,
        context: AudioBuffer | None = None,
        melody: SymbolicTrack | None = None,
        session_bpm: float = 120.0,
        session_key: Key = Key(0),
    ) -> AudioBuffer:
        """Create a new stem from a prompt block, optional context and melody.

        With a melody, the prompt audio acts as the timbre prototype for a
        symbolic render transposed into the session key.  Without one, the
        prompt audio is tempo-conformed from the block's BPM to the session
        BPM.  With context audio present the output is exactly context
        length; otherwise it is one conformed block long.
        """
        if isinstance(prompt, Block):
            if resolver is None:
                raise UnresolvableBlock(f"no audio resolver for {prompt.block_id}")
            try:
                prompt_audio = resolver(prompt)
            except Exception as exc:
                raise UnresolvableBlock(str(exc)) from exc
            prompt_bpm = prompt.bpm
        else:
            prompt_audio = prompt
            prompt_bpm = session_bpm

        target_rate = context.sample_rate if context is not None else prompt_audio.sample_rate
        prompt_audio = conform_rate(prompt_audio, target_rate)

        if melody is not None:
            rendered = render_symbolic(
                transpose(melody, session_key), timbre=prompt_audio,
                sample_rate=target_rate,
            )
            if context is None:
                return rendered
            padded = np.zeros((context.frame_count, rendered.channels))
            n = min(context.frame_count, rendered.frame_count)
            padded[:n] = rendered.samples[:n]
            return AudioBuffer(padded, target_rate)

        conformed = conform_tempo(prompt_audio, prompt_bpm, session_bpm)
        if context is None:
            return conformed
        return loop_to_length(conformed, context.frame_count)

    return tool_stem_generation


# ---------------------------------------------------------------------------
# understanding tools
# ---------------------------------------------------------------------------

def tool_source_separation(audio: AudioBuffer) -> dict[TimbralType, AudioBuffer]:
    """Band-split stand-in for source separation; stems sum to the input."""
    if audio.frame_count == 0:
        raise EmptyBuffer("cannot separate an empty buffer")
    low, mid, high = band_split(audio)
    return dict(zip(_BAND_STEM_MAP, (low, mid, high)))


def tool_structure_analysis(audio: AudioBuffer) -> list[tuple[float, float, TemporalType]]:
    return [
        (start, end, _SECTION_LABELS.get(label, TemporalType.VERSE))
        for start, end, label in segment_structure(audio)
    ]


def make_classification(thresholds: ClassifierThresholds | None = None):
    th = thresholds or ClassifierThresholds()

    def tool_classification(audio: AudioBuffer) -> TimbralType:
        """Timbral role by rule cascade over features and the pitch track."""
        if audio.frame_count == 0:
            raise EmptyBuffer("cannot classify an empty buffer")
        feats = extract_features(audio)
        mono = AudioBuffer(audio.mono(), audio.sample_rate)
        frame_ms = 40.0
        if mono.duration_seconds * 1000.0 < frame_ms:
            frame_ms = max(20.0, mono.duration_seconds * 1000.0)
        track = detect_pitch(mono, frame_ms=frame_ms)
        voiced = [f for _, f in track if f]
        voiced_ratio = len(voiced) / len(track) if track else 0.0

        if feats.zero_crossing_rate > th.drums_zcr and voiced_ratio < th.stable_pitch_ratio:
            return TimbralType.DRUMS
        if feats.spectral_centroid_hz < th.bass_centroid:
            return TimbralType.BASS
        if (
            voiced_ratio > th.melody_voiced_ratio
            and th.melody_centroid_low <= feats.spectral_centroid_hz <= th.melody_centroid_high
        ):
            semitones = [hz_to_midi(f) for f in voiced]
            if float(np.std(semitones)) > th.melody_pitch_std_semitones:
                return TimbralType.MELODY
            return TimbralType.CHORDS
        return TimbralType.FX

    return tool_classification


# ---------------------------------------------------------------------------
# lyric-to-melody
# ---------------------------------------------------------------------------

def count_syllables(lyrics: str) -> int:
    return sum(
        len(_VOWEL_GROUPS.findall(token)) for token in lyrics.lower().split()
    )


def _degree_hash(seed: int, index: int) -> int:
    digest = hashlib.blake2b(f"{seed}:{index}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def tool_lyric_to_melody(
    lyrics: str, key: Key = Key(0), bpm: float = 120.0, seed: int = 0
) -> SymbolicTrack:
    """One note per syllable: seeded stepwise walk over the key's scale,
    one beat each, final note held two beats."""
    n = count_syllables(lyrics)
    if n == 0:
        raise NoSyllables(f"no syllables found in {lyrics!r}")
    scale = MINOR_SCALE if key.is_minor else MAJOR_SCALE
    degree = _degree_hash(seed, 0) % 7
    notes = []
    for i in range(n):
        if i > 0:
            step = (_degree_hash(seed, i) % 5) - 2  # stepwise bias: |delta| <= 2
            degree = min(6, max(0, degree + step))
        pitch = 60 + key.tonic + scale[degree]
        duration = 2.0 if i == n - 1 else 1.0
        notes.append(
            NoteEvent(
                pitch=pitch,
                onset_beats=float(i),
                duration_beats=duration,
                velocity=_DEFAULT_VELOCITY,
            )
        )
    return SymbolicTrack(notes=tuple(notes), bpm=bpm, key=key)


# ---------------------------------------------------------------------------
# registration
# ---------------------------------------------------------------------------

TRANSCRIPTION = "midi-transcription"
STEM_GENERATION = "stem-generation"
SOURCE_SEPARATION = "music-source-separation"
STRUCTURE_ANALYSIS = "music-structure-analysis"
CLASSIFICATION = "music-classification"
LYRIC_TO_MELODY = "lyric-to-melody"

STUB_TOOLS = (
    "singing-voice-synthesis",
    "singing-voice-conversion",
    "single-song-generation",
    "music-captioning",
)


def register_builtin_tools(
    registry: ToolRegistry,
    audio_resolver: AudioResolver | None = None,
    thresholds: ClassifierThresholds | None = None,
) -> None:
    """Register the six implemented tools."""
    registry.register(
        ToolSpec(
            name=TRANSCRIPTION,
            inputs={"audio": SlotSpec(Modality.AUDIO)},
            output=Modality.SYMBOLIC,
            description="monophonic audio to quantized MIDI-like notes",
        ),
        tool_transcription,
    )
    registry.register(
        ToolSpec(
            name=STEM_GENERATION,
            inputs={
                "prompt": SlotSpec(Modality.AUDIO),
                "context": SlotSpec(Modality.AUDIO, required=False),
                "melody": SlotSpec(Modality.SYMBOLIC, required=False),
            },
            output=Modality.AUDIO,
            description="new instrumental stem from prompt timbre, optional "
            "context length and melodic guide",
        ),
        make_stem_generation(audio_resolver),
    )
    registry.register(
        ToolSpec(
            name=SOURCE_SEPARATION,
            inputs={"audio": SlotSpec(Modality.AUDIO)},
            output=Modality.AUDIO,
            description="split a mix into stems (band-split stand-in)",
        ),
        tool_source_separation,
    )
    registry.register(
        ToolSpec(
            name=STRUCTURE_ANALYSIS,
            inputs={"audio": SlotSpec(Modality.AUDIO)},
            output=Modality.TEXT,
            description="labeled structural sections",
        ),
        tool_structure_analysis,
    )
    registry.register(
        ToolSpec(
            name=CLASSIFICATION,
            inputs={"audio": SlotSpec(Modality.AUDIO)},
            output=Modality.TEXT,
            description="timbral role of a stem",
        ),
        make_classification(thresholds),
    )
    registry.register(
        ToolSpec(
            name=LYRIC_TO_MELODY,
            inputs={"lyrics": SlotSpec(Modality.TEXT)},
            output=Modality.SYMBOLIC,
            description="seeded melody from lyrics, one note per syllable",
        ),
        tool_lyric_to_melody,
    )


def _stub(name: str):
    def impl(**_kwargs):
        raise NotImplementedTool(f"{name} is a registry stub")

    return impl


def register_stub_tools(registry: ToolRegistry) -> None:
    """Register the four declared-but-unimplemented tools."""
    registry.register(
        ToolSpec(
            name="singing-voice-synthesis",
            inputs={
                "lyrics": SlotSpec(Modality.TEXT),
                "score": SlotSpec(Modality.SYMBOLIC),
            },
            output=Modality.AUDIO,
            description="vocals from lyrics and a score (stub)",
        ),
        _stub("singing-voice-synthesis"),
    )
    registry.register(
        ToolSpec(
            name="singing-voice-conversion",
            inputs={
                "vocal": SlotSpec(Modality.AUDIO),
                "target_timbre": SlotSpec(Modality.AUDIO),
            },
            output=Modality.AUDIO,
            description="re-timbre an existing vocal track (stub)",
        ),
        _stub("singing-voice-conversion"),
    )
    registry.register(
        ToolSpec(
            name="single-song-generation",
            inputs={
                "description": SlotSpec(Modality.TEXT),
                "melody": SlotSpec(Modality.SYMBOLIC, required=False),
                "prompt": SlotSpec(Modality.AUDIO, required=False),
            },
            output=Modality.AUDIO,
            description="full song from multi-modal inputs (stub)",
        ),
        _stub("single-song-generation"),
    )
    registry.register(
        ToolSpec(
            name="music-captioning",
            inputs={"audio": SlotSpec(Modality.AUDIO)},
            output=Modality.TEXT,
            description="describe audio in words (stub)",
        ),
        _stub("music-captioning"),
    )


def build_registry(
    audio_resolver: AudioResolver | None = None,
    thresholds: ClassifierThresholds | None = None,
    include_stubs: bool = True,
) -> ToolRegistry:
    registry = ToolRegistry()
    register_builtin_tools(registry, audio_resolver, thresholds)
    if include_stubs:
        register_stub_tools(registry)
    return registry
