"""Process-level wiring: stores on disk, session persistence, settlements.

Data directory layout:

    data_dir/catalog/blocks.jsonl + audio/*.wav   block catalog
    data_dir/ledger.jsonl                         attribution event log
    data_dir/settlements/<session>_<rule>.json    persisted settlement reports
    data_dir/sessions/<id>/state.json             session snapshot (atomic)
    data_dir/sessions/<id>/audio/<sha>.wav        content-addressed buffers

Durability order per turn: ledger events fsync as they are emitted, then the
session snapshot is replaced atomically (tmp + rename + fsync).  A turn is
"acknowledged" only after both, so a killed process never loses acked turns.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from pathlib import Path
from typing import Callable

from ..agent.runtime import Agent
from ..agent.session import SessionState, SessionTrack, Turn
from ..attribution.ledger import Ledger
from ..attribution.reports import StoredSettlement, creator_report
from ..attribution.settlement import (
    SettlementMethod,
    SettlementReport,
    SettlementRule,
    settle,
)
from ..audio.buffer import AudioBuffer, Key
from ..audio.wav import load_wav, save_wav
from ..blockdb.catalog import BlockCatalog
from ..blockdb.model import Block
from ..errors import ConcurrentTurn, NoQualifyingEvents, UnknownSession
from ..tools.builtin import ClassifierThresholds, build_registry
from .config import Config

_SESSION_SCHEMA = 1


def _fsync_dir(path: Path) -> None:
    try:
        fd = os.open(path, os.O_RDONLY)
    except OSError:
        return
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


def _atomic_write(path: Path, data: bytes) -> None:
    tmp = path.with_suffix(".tmp")
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)
    _fsync_dir(path.parent)


class SessionStore:
    """Disk-backed session map with per-session turn locks."""

    def __init__(self, root: Path, clock: Callable[[], float] = time.time):
        self._root = root
        self._root.mkdir(parents=True, exist_ok=True)
        self._clock = clock
        self._cache: dict[str, SessionState] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        self._counter = self._scan_counter()

    def _scan_counter(self) -> int:
        best = 0
        for child in self._root.iterdir() if self._root.exists() else []:
            name = child.name
            if name.startswith("s") and name[1:].isdigit():
                best = max(best, int(name[1:]))
        return best

    def create(self, bpm: float, key: Key) -> SessionState:
        with self._registry_lock:
            self._counter += 1
            session_id = f"s{self._counter:06d}"
        session = SessionState(session_id=session_id, bpm=bpm, key=key)
        self._cache[session_id] = session
        self.save(session)
        return session

    def exists(self, session_id: str) -> bool:
        return session_id in self._cache or (self._root / session_id / "state.json").exists()

    def get(self, session_id: str) -> SessionState:
        session = self._cache.get(session_id)
        if session is not None:
            return session
        path = self._root / session_id / "state.json"
        if not path.exists():
            raise UnknownSession(f"no such session: {session_id}")
        session = self._load(session_id, path)
        self._cache[session_id] = session
        return session

    def turn_lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    # -- persistence -------------------------------------------------------

    def _audio_dir(self, session_id: str) -> Path:
        d = self._root / session_id / "audio"
        d.mkdir(parents=True, exist_ok=True)
        return d

    def _store_audio(self, session_id: str, audio: AudioBuffer) -> str:
        wav = save_wav(audio)
        digest = hashlib.sha256(wav).hexdigest()
        path = self._audio_dir(session_id) / f"{digest}.wav"
        if not path.exists():
            path.write_bytes(wav)
        return digest

    def _track_dict(self, session_id: str, track: SessionTrack) -> dict:
        return {
            "track_id": track.track_id,
            "label": track.label,
            "audio": self._store_audio(session_id, track.audio),
            "provenance": list(track.provenance),
        }

    def save(self, session: SessionState) -> None:
        sid = session.session_id
        state = {
            "schema": _SESSION_SCHEMA,
            "session_id": sid,
            "bpm": session.bpm,
            "key_tonic": session.key.tonic,
            "key_mode": session.key.mode,
            "next_track_id": session.next_track_id,
            "tracks": [self._track_dict(sid, t) for t in session.tracks],
            "uploads": [self._store_audio(sid, u) for u in session.uploads],
            "undo": [
                [self._track_dict(sid, t) for t in snapshot]
                for snapshot in session.undo_stack
            ],
            "turns": [
                {
                    "turn_id": t.turn_id,
                    "prompt": t.prompt,
                    "command": t.command,
                    "status": t.status,
                    "response_text": t.response_text,
                    "error": t.error,
                    "event_ids": list(t.event_ids),
                }
                for t in session.turns
            ],
        }
        payload = json.dumps(state).encode("utf-8")
        session_dir = self._root / sid
        session_dir.mkdir(parents=True, exist_ok=True)
        _atomic_write(session_dir / "state.json", payload)

    def _load(self, session_id: str, path: Path) -> SessionState:
        state = json.loads(path.read_text(encoding="utf-8"))
        audio_dir = self._root / session_id / "audio"

        def load_audio(digest: str) -> AudioBuffer:
            return load_wav((audio_dir / f"{digest}.wav").read_bytes())

        def load_track(d: dict) -> SessionTrack:
            return SessionTrack(
                track_id=d["track_id"],
                label=d["label"],
                audio=load_audio(d["audio"]),
                provenance=tuple(d["provenance"]),
            )

        return SessionState(
            session_id=state["session_id"],
            bpm=float(state["bpm"]),
            key=Key(int(state["key_tonic"]), state["key_mode"]),
            tracks=[load_track(d) for d in state["tracks"]],
            uploads=[load_audio(d) for d in state["uploads"]],
            undo_stack=[
                tuple(load_track(d) for d in snapshot) for snapshot in state["undo"]
            ],
            turns=[
                Turn(
                    turn_id=t["turn_id"],
                    prompt=t["prompt"],
                    command=t.get("command"),
                    status=t["status"],
                    response_text=t.get("response_text", ""),
                    error=t.get("error"),
                    event_ids=tuple(t.get("event_ids", ())),
                )
                for t in state["turns"]
            ],
            next_track_id=int(state["next_track_id"]),
        )


class SettlementStore:
    """One persisted report per (session, rule); idempotent per pool."""

    def __init__(self, root: Path, clock: Callable[[], float] = time.time):
        self._root = root
        self._root.mkdir(parents=True, exist_ok=True)
        self._clock = clock
        self._lock = threading.Lock()

    def _path(self, session_id: str, rule: SettlementRule) -> Path:
        return self._root / f"{session_id}_{rule.method.value}.json"

    def settle(
        self, events, session_id: str, pool_microunits: int, rule: SettlementRule
    ) -> dict:
        """Return the stored report when one exists for the same pool,
        otherwise compute, persist, and return it."""
        with self._lock:
            path = self._path(session_id, rule)
            if path.exists():
                stored = json.loads(path.read_text(encoding="utf-8"))
                if stored["report"]["pool_microunits"] == pool_microunits:
                    return stored
            report = settle(events, session_id, pool_microunits, rule)
            stored = {"report": report.to_dict(), "settled_at": self._clock()}
            payload = json.dumps(stored, sort_keys=True).encode("utf-8")
            _atomic_write(path, payload)
            return json.loads(payload)  # byte-identical to later stored reads

    def all_settlements(self) -> list[StoredSettlement]:
        out = []
        for path in sorted(self._root.glob("*.json")):
            data = json.loads(path.read_text(encoding="utf-8"))
            out.append(
                StoredSettlement(
                    report=SettlementReport.from_dict(data["report"]),
                    settled_at=float(data["settled_at"]),
                )
            )
        return out


class AppState:
    """Composition root: catalog, ledger, tools, agent, stores."""

    def __init__(
        self,
        config: Config,
        clock: Callable[[], float] = time.time,
        catalog_dir: str | Path | None = None,
    ):
        self.config = config
        self.clock = clock
        data_dir = Path(config.data_dir)
        data_dir.mkdir(parents=True, exist_ok=True)

        self.catalog = BlockCatalog(
            catalog_dir if catalog_dir is not None else data_dir / "catalog",
            clock=clock,
            score_weights=config.score_weights(),
        )
        self.ledger = Ledger(
            data_dir / "ledger.jsonl",
            clock=clock,
            block_resolver=self._creator_of,
        )
        thresholds = ClassifierThresholds(
            drums_zcr=config.classify_drums_zcr,
            stable_pitch_ratio=config.classify_stable_pitch_ratio,
            bass_centroid=config.classify_bass_centroid,
            melody_centroid_low=config.classify_melody_centroid_low,
            melody_centroid_high=config.classify_melody_centroid_high,
            melody_voiced_ratio=config.classify_melody_voiced_ratio,
            melody_pitch_std_semitones=config.classify_melody_pitch_std,
        )
        self.registry = build_registry(
            audio_resolver=self._audio_of, thresholds=thresholds
        )
        self.agent = Agent(
            catalog=self.catalog,
            registry=self.registry,
            ledger=self.ledger,
            role_weights=dict(config.role_weights),
            bpm_tolerance=config.bpm_tolerance_fraction,
            min_key_compatibility=config.min_key_compatibility,
        )
        self.sessions = SessionStore(data_dir / "sessions", clock=clock)
        self.settlements = SettlementStore(data_dir / "settlements", clock=clock)

    def _creator_of(self, block_id: str) -> str | None:
        if not self.catalog.has_block(block_id):
            return None
        return self.catalog.get_block(block_id).creator_id

    def _audio_of(self, block: Block) -> AudioBuffer:
        return self.catalog.get_audio(block.block_id)

    def default_key(self) -> Key:
        return Key.parse(self.config.default_key)

    # -- turn pipeline -------------------------------------------------------

    def run_turn(self, session_id: str, prompt: str):
        """Serialized turn execution with post-turn durability."""
        if not self.sessions.exists(session_id):
            raise UnknownSession(f"no such session: {session_id}")
        lock = self.sessions.turn_lock(session_id)
        if not lock.acquire(blocking=False):
            raise ConcurrentTurn(f"a turn is already running on {session_id}")
        try:
            session = self.sessions.get(session_id)
            try:
                response = self.agent.run_turn(session, prompt)
            finally:
                self.sessions.save(session)  # failed turns persist their record too
            return response
        finally:
            lock.release()

    # -- attribution views ---------------------------------------------------

    def settlement(self, session_id: str, rule_name: str, pool: int) -> dict:
        if not self.sessions.exists(session_id):
            raise UnknownSession(f"no such session: {session_id}")
        rule = SettlementRule(
            method=SettlementMethod(rule_name),
            role_weights=dict(self.config.role_weights),
        )
        try:
            return self.settlements.settle(self.ledger.events, session_id, pool, rule)
        except NoQualifyingEvents:
            raise

    def creator_report(self, creator_id: str, time_from=None, time_to=None):
        return creator_report(
            self.ledger.events,
            self.settlements.all_settlements(),
            creator_id,
            time_from,
            time_to,
        )
