"""Append-only hash-chained attribution event ledger.

On-disk format: one JSON object per line, UTF-8, fixed field order, with
``event_hash`` always the last field.  The hashed bytes for an event are the
exact on-disk line with the trailing ``,"event_hash":"<hex>"}`` replaced by
``}`` - i.e. the line minus the hash field.  ``prev_hash`` chains to the
previous event's hash (the genesis event chains to 64 hex zeros) and every
hash is lowercase-hex SHA-256.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

from ..errors import CorruptLedger, LedgerIOFailure, UnknownBlockInEvent

GENESIS_HASH = "0" * 64

USAGE_ROLES = ("prompt_audio", "context_audio", "symbolic_source", "direct_inclusion")

_HASH_FIELD_MARKER = ',"event_hash":"'


@dataclass(frozen=True)
class AttributionEvent:
    """One ledger record: a block retrieved for use in a session turn."""

    event_id: int
    session_id: str
    turn_id: int
    block_id: str
    creator_id: str
    usage_role: str
    weight: float
    turn_failed: bool
    timestamp: float
    prev_hash: str
    event_hash: str


def _canonical_prefix(event_fields: dict) -> str:
    """JSON object for the event without event_hash, fixed field order."""
    ordered = {
        "event_id": event_fields["event_id"],
        "session_id": event_fields["session_id"],
        "turn_id": event_fields["turn_id"],
        "block_id": event_fields["block_id"],
        "creator_id": event_fields["creator_id"],
        "usage_role": event_fields["usage_role"],
        "weight": event_fields["weight"],
        "turn_failed": event_fields["turn_failed"],
        "timestamp": event_fields["timestamp"],
        "prev_hash": event_fields["prev_hash"],
    }
    return json.dumps(ordered, separators=(",", ":"))


def _hash_prefix(prefix: str) -> str:
    return hashlib.sha256(prefix.encode("utf-8")).hexdigest()


def event_to_line(event: AttributionEvent) -> str:
    prefix = _canonical_prefix(event.__dict__)
    return f'{prefix[:-1]}{_HASH_FIELD_MARKER}{event.event_hash}"}}'


def _parse_line(line: str, position: int, prev_hash: str) -> AttributionEvent | None:
    """Validate one ledger line; None signals corruption at this position."""
    idx = line.rfind(_HASH_FIELD_MARKER)
    if idx < 0 or not line.endswith('"}'):
        return None
    stored_hash = line[idx + len(_HASH_FIELD_MARKER) : -2]
    prefix = line[:idx] + "}"
    if len(stored_hash) != 64 or _hash_prefix(prefix) != stored_hash:
        return None
    try:
        fields = json.loads(prefix)
    except json.JSONDecodeError:
        return None
    try:
        event = AttributionEvent(event_hash=stored_hash, **fields)
    except TypeError:
        return None
    if event.event_id != position or event.prev_hash != prev_hash:
        return None
    if event.usage_role not in USAGE_ROLES:
        return None
    return event


def _to_lines(text: str) -> list[str]:
    if not text:
        return []
    return text.split("\n")[:-1] if text.endswith("\n") else text.split("\n")


def verify_chain(lines: Iterable[str]) -> int | None:
    """Recompute every hash and link; return the first corrupt event_id, or
    None when the whole chain is intact."""
    prev = GENESIS_HASH
    position = 0
    for raw in lines:
        position += 1
        event = _parse_line(raw, position, prev)
        if event is None:
            return position
        prev = event.event_hash
    return None


def verify_chain_file(path: str | Path) -> int | None:
    path = Path(path)
    if not path.exists():
        return None
    # tolerate byte-level damage: bad UTF-8 decodes to replacement chars,
    # which then fail the hash check at the damaged line
    text = path.read_bytes().decode("utf-8", errors="replace")
    return verify_chain(_to_lines(text))


def replay(lines: Iterable[str]) -> list[AttributionEvent]:
    """Rebuild the event list from raw lines; raises CorruptLedger on any
    chain violation."""
    events: list[AttributionEvent] = []
    prev = GENESIS_HASH
    for position, raw in enumerate(lines, start=1):
        event = _parse_line(raw, position, prev)
        if event is None:
            raise CorruptLedger(f"ledger corrupt at event {position}")
        events.append(event)
        prev = event.event_hash
    return events


def replay_file(path: str | Path) -> list[AttributionEvent]:
    path = Path(path)
    if not path.exists():
        return []
    text = path.read_bytes().decode("utf-8", errors="replace")
    return replay(_to_lines(text))


class Ledger:
    """Serialized single-writer event log with write-ahead durability.

    ``record_event`` assigns the next sequence number, chains the hashes,
    and fsyncs the line to disk before returning, so an acknowledged event
    survives a crash.  A torn trailing write (no final newline) is discarded
    on open; corruption anywhere earlier refuses to open.
    """

    def __init__(
        self,
        path: str | Path | None = None,
        clock: Callable[[], float] = time.time,
        block_resolver: Callable[[str], str] | None = None,
    ):
        self._path = Path(path) if path is not None else None
        self._clock = clock
        self._block_resolver = block_resolver
        self._lock = threading.Lock()
        self._events: list[AttributionEvent] = []
        self._fh = None
        if self._path is not None:
            self._open()

    def _open(self) -> None:
        self._path.parent.mkdir(parents=True, exist_ok=True)
        if self._path.exists():
            raw = self._path.read_text(encoding="utf-8")
            lines = raw.split("\n")
            complete = lines[:-1]  # text after the last newline is a torn write
            torn = lines[-1]
            try:
                self._events = replay(complete)
            except CorruptLedger:
                raise
            if torn:
                keep = sum(len(line) + 1 for line in complete)
                with open(self._path, "r+", encoding="utf-8") as fh:
                    fh.truncate(keep)
        self._fh = open(self._path, "a", encoding="utf-8")

    @property
    def events(self) -> tuple[AttributionEvent, ...]:
        return tuple(self._events)

    def __len__(self) -> int:
        return len(self._events)

    def record_event(
        self,
        session_id: str,
        turn_id: int,
        block_id: str,
        creator_id: str,
        usage_role: str,
        weight: float,
        turn_failed: bool = False,
    ) -> AttributionEvent:
        """Append one event durably and return it with hashes filled in."""
        if usage_role not in USAGE_ROLES:
            raise ValueError(f"unknown usage role: {usage_role}")
        if weight <= 0:
            raise ValueError("weight must be positive")
        if self._block_resolver is not None:
            actual = self._block_resolver(block_id)
            if actual is None:
                raise UnknownBlockInEvent(f"no such block: {block_id}")
            if actual != creator_id:
                raise UnknownBlockInEvent(
                    f"creator mismatch for {block_id}: {creator_id} != {actual}"
                )
        with self._lock:
            prev = self._events[-1].event_hash if self._events else GENESIS_HASH
            fields = {
                "event_id": len(self._events) + 1,
                "session_id": session_id,
                "turn_id": turn_id,
                "block_id": block_id,
                "creator_id": creator_id,
                "usage_role": usage_role,
                "weight": weight,
                "turn_failed": turn_failed,
                "timestamp": self._clock(),
                "prev_hash": prev,
            }
            prefix = _canonical_prefix(fields)
            event = AttributionEvent(event_hash=_hash_prefix(prefix), **fields)
            if self._fh is not None:
                try:
                    self._fh.write(event_to_line(event) + "\n")
                    self._fh.flush()
                    os.fsync(self._fh.fileno())
                except OSError as exc:
                    raise LedgerIOFailure(str(exc)) from exc
            self._events.append(event)
            return event

    def verify(self) -> int | None:
        if self._path is None:
            return verify_chain(event_to_line(e) for e in self._events)
        return verify_chain_file(self._path)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None
