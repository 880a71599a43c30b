"""Hash-chain ledger contracts: chaining, tamper detection, replay."""
import random

import pytest

from blockstudio.attribution import (
    GENESIS_HASH,
    Ledger,
    event_to_line,
    replay,
    replay_file,
    verify_chain,
    verify_chain_file,
)
from blockstudio.errors import CorruptLedger, UnknownBlockInEvent


def _fill(ledger: Ledger, n: int, session="s1") -> None:
    roles = ["prompt_audio", "context_audio", "symbolic_source", "direct_inclusion"]
    weights = {"prompt_audio": 1.0, "context_audio": 0.5,
               "symbolic_source": 0.75, "direct_inclusion": 1.0}
    rng = random.Random(42)
    for i in range(n):
        role = roles[rng.randrange(4)]
        ledger.record_event(
            session_id=session,
            turn_id=i // 3 + 1,
            block_id=f"b{rng.randrange(50):04d}",
            creator_id=f"creator{rng.randrange(8)}",
            usage_role=role,
            weight=weights[role],
        )


def test_first_event_has_genesis_prev_hash(tmp_path):
    ledger = Ledger(tmp_path / "ledger.jsonl")
    e = ledger.record_event("s1", 1, "b1", "alice", "prompt_audio", 1.0)
    assert e.prev_hash == GENESIS_HASH
    assert e.event_id == 1


def test_chain_links_sequential_events(tmp_path):
    ledger = Ledger(tmp_path / "ledger.jsonl")
    e1 = ledger.record_event("s1", 1, "b1", "alice", "prompt_audio", 1.0)
    e2 = ledger.record_event("s1", 1, "b2", "bob", "context_audio", 0.5)
    assert e2.prev_hash == e1.event_hash
    assert e2.event_id == 2


def test_same_draft_same_clock_same_hash(tmp_path):
    clock = lambda: 1700000000.0
    l1 = Ledger(tmp_path / "a.jsonl", clock=clock)
    l2 = Ledger(tmp_path / "b.jsonl", clock=clock)
    e1 = l1.record_event("s1", 1, "b1", "alice", "prompt_audio", 1.0)
    e2 = l2.record_event("s1", 1, "b1", "alice", "prompt_audio", 1.0)
    assert e1.event_hash == e2.event_hash


def test_verify_empty_ledger_ok(tmp_path):
    assert verify_chain_file(tmp_path / "missing.jsonl") is None
    assert verify_chain([]) is None


def test_verify_untampered_100_events(tmp_path):
    path = tmp_path / "ledger.jsonl"
    ledger = Ledger(path)
    _fill(ledger, 100)
    assert verify_chain_file(path) is None
    assert ledger.verify() is None


def test_tamper_single_byte_detected_at_exact_event(tmp_path):
    path = tmp_path / "ledger.jsonl"
    ledger = Ledger(path)
    _fill(ledger, 100)
    ledger.close()
    raw = path.read_bytes()
    lines = raw.split(b"\n")
    # flip one byte inside event 57's creator_id field
    target = lines[56]
    idx = target.find(b"creator_id")
    pos = idx + len(b'creator_id":"creator')
    mutated = target[:pos] + (b"9" if target[pos : pos + 1] != b"9" else b"8") + target[pos + 1 :]
    lines[56] = mutated
    path.write_bytes(b"\n".join(lines))
    assert verify_chain_file(path) == 57


def test_events_memory_only_ledger_verifies():
    ledger = Ledger()
    _fill(ledger, 10)
    assert ledger.verify() is None


def test_replay_empty():
    assert replay([]) == []


def test_replay_equals_live_state(tmp_path):
    path = tmp_path / "ledger.jsonl"
    ledger = Ledger(path)
    _fill(ledger, 200)
    ledger.close()
    replayed = replay_file(path)
    assert replayed == list(ledger.events)


def test_replay_rejects_tampered(tmp_path):
    path = tmp_path / "ledger.jsonl"
    ledger = Ledger(path)
    _fill(ledger, 20)
    ledger.close()
    raw = bytearray(path.read_bytes())
    raw[len(raw) // 2] ^= 0x01
    path.write_bytes(bytes(raw))
    with pytest.raises(CorruptLedger):
        replay_file(path)


def test_reopen_continues_chain(tmp_path):
    path = tmp_path / "ledger.jsonl"
    ledger = Ledger(path)
    _fill(ledger, 5)
    last_hash = ledger.events[-1].event_hash
    ledger.close()
    reopened = Ledger(path)
    assert len(reopened) == 5
    e6 = reopened.record_event("s2", 1, "b9", "zed", "prompt_audio", 1.0)
    assert e6.event_id == 6
    assert e6.prev_hash == last_hash
    assert verify_chain_file(path) is None


def test_torn_trailing_write_discarded_on_open(tmp_path):
    path = tmp_path / "ledger.jsonl"
    ledger = Ledger(path)
    _fill(ledger, 5)
    ledger.close()
    with open(path, "a", encoding="utf-8") as fh:
        fh.write('{"event_id":6,"session_id":"s1"')  # no newline: torn write
    reopened = Ledger(path)
    assert len(reopened) == 5
    assert verify_chain_file(path) is None


def test_mid_file_corruption_refuses_open(tmp_path):
    path = tmp_path / "ledger.jsonl"
    ledger = Ledger(path)
    _fill(ledger, 5)
    ledger.close()
    lines = path.read_text().splitlines()
    lines[2] = lines[2].replace("creator", "creatox", 1)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(CorruptLedger):
        Ledger(path)


def test_block_resolver_checks_existence_and_creator(tmp_path):
    creators = {"b1": "alice"}
    ledger = Ledger(tmp_path / "l.jsonl", block_resolver=creators.get)
    ledger.record_event("s1", 1, "b1", "alice", "prompt_audio", 1.0)
    with pytest.raises(UnknownBlockInEvent):
        ledger.record_event("s1", 1, "missing", "alice", "prompt_audio", 1.0)
    with pytest.raises(UnknownBlockInEvent):
        ledger.record_event("s1", 1, "b1", "mallory", "prompt_audio", 1.0)


def test_event_line_round_trip(tmp_path):
    ledger = Ledger(tmp_path / "l.jsonl")
    e = ledger.record_event("s1", 2, "b7", "carol", "symbolic_source", 0.75)
    line = event_to_line(e)
    assert verify_chain([line]) is None
    assert replay([line])[0] == e
