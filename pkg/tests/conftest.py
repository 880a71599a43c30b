"""Shared fixtures: seeded catalogs and wired agents."""
from __future__ import annotations

import itertools

import pytest

from blockstudio.agent import Agent, SessionState
from blockstudio.attribution import Ledger
from blockstudio.audio import Key
from blockstudio.blockdb import BlockCatalog, TemporalType, TimbralType
from blockstudio.tools import build_registry

from . import signals

_counter = itertools.count(1)


def make_demo_catalog(root=None, clock=None) -> BlockCatalog:
    """Five blocks with distinct captions/creators, all 120 BPM C major."""
    kwargs = {"clock": clock} if clock else {}
    cat = BlockCatalog(root, **kwargs)
    c_major = Key.parse("C")
    specs = [
        (signals.sine(220, 2.0, sr=22050), TimbralType.MELODY, TemporalType.CHORUS,
         "alice", "retro-pop synth lead"),
        (signals.white_noise(2.0, sr=22050, seed=1), TimbralType.DRUMS, TemporalType.VERSE,
         "bob", "punchy retro drum loop"),
        (signals.sine(80, 2.0, sr=22050), TimbralType.BASS, TemporalType.VERSE,
         "carol", "warm analog bass"),
        (signals.sine(440, 2.0, 0.3, sr=22050), TimbralType.CHORDS, TemporalType.CHORUS,
         "dan", "lush string pads"),
        (signals.white_noise(2.0, 0.2, sr=22050, seed=2), TimbralType.FX, TemporalType.INTRO,
         "erin", "airy riser sweep"),
    ]
    for audio, timbral, temporal, creator, caption in specs:
        cat.ingest_stem(audio, timbral, temporal, creator_id=creator,
                        caption=caption, bpm=120.0, key=c_major)
    return cat


def make_agent(catalog: BlockCatalog, ledger: Ledger | None = None) -> Agent:
    ledger = ledger if ledger is not None else Ledger()
    registry = build_registry(
        audio_resolver=lambda blk: catalog.get_audio(blk.block_id)
    )
    return Agent(catalog, registry, ledger)


def make_session(session_id: str | None = None, **kwargs) -> SessionState:
    if session_id is None:
        session_id = f"test-session-{next(_counter)}"
    return SessionState(session_id=session_id, **kwargs)


@pytest.fixture
def demo_catalog():
    return make_demo_catalog()


@pytest.fixture
def demo_agent(demo_catalog):
    return make_agent(demo_catalog)


@pytest.fixture
def session():
    return make_session()
