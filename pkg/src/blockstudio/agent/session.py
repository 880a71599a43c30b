"""Session state: the multitrack composition built turn by turn."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..audio.buffer import AudioBuffer, Key
from ..audio.ops import mix
from ..errors import EmptySession, NothingToUndo

DEFAULT_BPM = 120.0
DEFAULT_KEY = Key(0)  # C major


@dataclass(frozen=True)
class SessionTrack:
    track_id: int
    label: str
    audio: AudioBuffer
    provenance: tuple[str, ...] = ()


@dataclass(frozen=True)
class Turn:
    turn_id: int
    prompt: str
    command: str | None
    status: str  # "ok" | "failed"
    response_text: str = ""
    error: str | None = None
    event_ids: tuple[int, ...] = ()


@dataclass
class SessionState:
    """One user's evolving composition: tracks, tempo, key, history."""

    session_id: str
    bpm: float = DEFAULT_BPM
    key: Key = DEFAULT_KEY
    tracks: list[SessionTrack] = field(default_factory=list)
    uploads: list[AudioBuffer] = field(default_factory=list)
    turns: list[Turn] = field(default_factory=list)
    undo_stack: list[tuple[SessionTrack, ...]] = field(default_factory=list)
    next_track_id: int = 1

    def track(self, track_id: int) -> SessionTrack:
        for t in self.tracks:
            if t.track_id == track_id:
                return t
        raise KeyError(track_id)

    def add_upload(self, audio: AudioBuffer) -> int:
        self.uploads.append(audio)
        return len(self.uploads) - 1

    def push_undo(self) -> None:
        self.undo_stack.append(tuple(self.tracks))

    def allocate_track_id(self) -> int:
        track_id = self.next_track_id
        self.next_track_id += 1
        return track_id


def undo(session: SessionState) -> None:
    """Restore the previous track state; turn history stays append-only."""
    if not session.undo_stack:
        raise NothingToUndo("no snapshots to restore")
    session.tracks = list(session.undo_stack.pop())


def render_session(session: SessionState) -> AudioBuffer:
    """Unit-gain mix of all tracks (gain edits are baked into buffers).

    Tracks are conformed to the first track's sample rate and the widest
    channel count before summation.
    """
    if not session.tracks:
        raise EmptySession("session has no tracks to render")
    from ..audio.ops import conform_rate

    rate = session.tracks[0].audio.sample_rate
    channels = max(t.audio.channels for t in session.tracks)
    layers = []
    for t in session.tracks:
        buf = conform_rate(t.audio, rate).with_channels(channels)
        layers.append((buf, 1.0))
    return mix(layers)
