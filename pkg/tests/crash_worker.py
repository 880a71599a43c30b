"""Subprocess worker for the crash-safety acceptance criterion.

Runs turns against a data directory and appends one ack line per completed
turn, fsynced strictly after the store committed it.  The parent SIGKILLs
this process at a random moment and then audits the store: every acked turn
must have survived.

Usage: python crash_worker.py <data_dir> <n_turns>
"""
import os
import sys

sys.path.insert(0, os.path.dirname(__file__))
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

import numpy as np  # noqa: E402

from blockstudio.audio import AudioBuffer, Key  # noqa: E402
from blockstudio.blockdb import TemporalType, TimbralType  # noqa: E402
from blockstudio.service.config import Config  # noqa: E402
from blockstudio.service.state import AppState  # noqa: E402


def _sine(freq, secs, sr=22050):
    t = np.arange(int(sr * secs)) / sr
    return AudioBuffer(0.5 * np.sin(2 * np.pi * freq * t), sr)


def main() -> None:
    data_dir, n_turns = sys.argv[1], int(sys.argv[2])
    state = AppState(Config(data_dir=data_dir))
    if len(state.catalog) == 0:
        c = Key.parse("C")
        state.catalog.ingest_stem(_sine(220, 1.0), TimbralType.MELODY,
                                  TemporalType.CHORUS, creator_id="alice",
                                  caption="retro synth lead", bpm=120.0, key=c)
        state.catalog.ingest_stem(_sine(80, 1.0), TimbralType.BASS,
                                  TemporalType.VERSE, creator_id="bob",
                                  caption="warm bass", bpm=120.0, key=c)
    session = state.sessions.create(bpm=120.0, key=Key.parse("C"))

    ack_path = os.path.join(data_dir, "acks.txt")
    ack = open(ack_path, "a", encoding="utf-8")
    prompts = ['ADD melody MATCHING "retro synth"', 'ADD bass MATCHING "warm bass"']
    for i in range(n_turns):
        state.run_turn(session.session_id, prompts[i % 2])
        turn = session.turns[-1]
        ack.write(f"{session.session_id} {turn.turn_id} {','.join(map(str, turn.event_ids))}\n")
        ack.flush()
        os.fsync(ack.fileno())
    print("worker done", flush=True)


if __name__ == "__main__":
    main()
