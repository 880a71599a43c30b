"""RIFF/WAVE encode and decode.

Reads PCM 16-bit and IEEE float 32-bit, 1-2 channels; writes canonical
44-byte-header PCM 16-bit little-endian.  The stdlib ``wave`` module cannot
read float WAVs, so the chunk walk is done by hand.
"""
from __future__ import annotations

import struct

import numpy as np

from ..errors import MalformedWav, UnsupportedFormat
from .buffer import AudioBuffer

_FMT_PCM = 1
_FMT_IEEE_FLOAT = 3
_FMT_EXTENSIBLE = 0xFFFE

MIN_SAMPLE_RATE = 8000
MAX_SAMPLE_RATE = 96000


def load_wav(data: bytes) -> AudioBuffer:
    """Decode WAV bytes into an AudioBuffer with samples in [-1, 1].

    Raises MalformedWav for truncated or structurally invalid containers and
    UnsupportedFormat for codecs or layouts outside PCM16/float32, 1-2 ch.
    """
    if len(data) < 12:
        raise MalformedWav("file shorter than RIFF header")
    if data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise MalformedWav("not a RIFF/WAVE container")

    fmt = None
    pcm_data = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (chunk_size,) = struct.unpack_from("<I", data, pos + 4)
        body_start = pos + 8
        body_end = body_start + chunk_size
        if body_end > len(data):
            raise MalformedWav(f"chunk {chunk_id!r} truncated")
        if chunk_id == b"fmt ":
            if chunk_size < 16:
                raise MalformedWav("fmt chunk too small")
            fmt = struct.unpack_from("<HHIIHH", data, body_start)
        elif chunk_id == b"data":
            pcm_data = data[body_start:body_end]
        pos = body_end + (chunk_size & 1)  # chunks are word-aligned

    if fmt is None:
        raise MalformedWav("missing fmt chunk")
    if pcm_data is None:
        raise MalformedWav("missing data chunk")

    audio_format, channels, sample_rate, _, block_align, bits = fmt
    if audio_format == _FMT_EXTENSIBLE:
        raise UnsupportedFormat("WAVE_FORMAT_EXTENSIBLE not supported")
    if audio_format not in (_FMT_PCM, _FMT_IEEE_FLOAT):
        raise UnsupportedFormat(f"compression format {audio_format} not supported")
    if channels not in (1, 2):
        raise UnsupportedFormat(f"{channels} channels not supported")
    if not MIN_SAMPLE_RATE <= sample_rate <= MAX_SAMPLE_RATE:
        raise UnsupportedFormat(f"sample rate {sample_rate} outside 8000-96000 Hz")
    if audio_format == _FMT_PCM and bits != 16:
        raise UnsupportedFormat(f"{bits}-bit PCM not supported (16-bit only)")
    if audio_format == _FMT_IEEE_FLOAT and bits != 32:
        raise UnsupportedFormat(f"{bits}-bit float not supported (32-bit only)")

    bytes_per_frame = channels * (bits // 8)
    if block_align not in (0, bytes_per_frame):
        raise MalformedWav("block alignment inconsistent with format")
    if len(pcm_data) % bytes_per_frame != 0:
        raise MalformedWav("data chunk not a whole number of frames")

    if audio_format == _FMT_PCM:
        raw = np.frombuffer(pcm_data, dtype="<i2").astype(np.float32) / 32768.0
    else:
        raw = np.frombuffer(pcm_data, dtype="<f4").astype(np.float32)
    return AudioBuffer(raw.reshape(-1, channels), sample_rate)


def save_wav(buffer: AudioBuffer) -> bytes:
    """Encode as PCM 16-bit RIFF/WAVE with the canonical 44-byte header."""
    scaled = np.round(buffer.samples.astype(np.float64) * 32768.0)
    ints = np.clip(scaled, -32768, 32767).astype("<i2")
    payload = ints.tobytes()

    channels = buffer.channels
    sample_rate = buffer.sample_rate
    byte_rate = sample_rate * channels * 2
    block_align = channels * 2
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, _FMT_PCM, channels, sample_rate, byte_rate, block_align, 16
    )
    header += b"data" + struct.pack("<I", len(payload))
    return header + payload
