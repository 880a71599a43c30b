"""Key parsing, estimation, and compatibility scoring."""
import numpy as np
import pytest

from blockstudio.audio import Key
from blockstudio.blockdb import (
    estimate_key,
    estimate_key_from_histogram,
    key_compatibility,
)

from . import signals

# independent oracle: tonic -> position on the circle of fifths, by listing
# the circle explicitly (C G D A E B F# C# G# D# A# F)
_CIRCLE = [0, 7, 2, 9, 4, 11, 6, 1, 8, 3, 10, 5]


def _oracle_distance(a: int, b: int) -> int:
    pa, pb = _CIRCLE.index(a), _CIRCLE.index(b)
    d = abs(pa - pb)
    return min(d, 12 - d)


def test_key_parse_literals():
    assert Key.parse("C") == Key(0, "major")
    assert Key.parse("Amin") == Key(9, "minor")
    assert Key.parse("F#maj") == Key(6, "major")
    assert Key.parse("Ebmin") == Key(3, "minor")
    assert Key.parse("bmin") == Key(11, "minor")
    with pytest.raises(ValueError):
        Key.parse("H")
    with pytest.raises(ValueError):
        Key.parse("Cmixolydian")


def test_compat_identical_keys():
    assert key_compatibility(Key.parse("C"), Key.parse("C")) == 1.0
    assert key_compatibility(Key.parse("Amin"), Key.parse("Amin")) == 1.0


def test_compat_relative_pair():
    assert key_compatibility(Key.parse("C"), Key.parse("Amin")) == 0.9
    assert key_compatibility(Key.parse("Amin"), Key.parse("C")) == 0.9


def test_compat_neighbor_distance_one():
    assert key_compatibility(Key.parse("C"), Key.parse("G")) == pytest.approx(0.8)


def test_compat_matches_circle_oracle_for_all_major_pairs():
    for a in range(12):
        for b in range(12):
            if a == b:
                continue
            got = key_compatibility(Key(a), Key(b))
            expected = max(0.0, 1.0 - 0.2 * _oracle_distance(a, b))
            assert got == pytest.approx(expected), (a, b)


def test_compat_symmetric():
    keys = [Key(t, m) for t in range(12) for m in ("major", "minor")]
    for a in keys:
        for b in keys:
            assert key_compatibility(a, b) == key_compatibility(b, a)


def test_compat_one_only_for_identical():
    keys = [Key(t, m) for t in range(12) for m in ("major", "minor")]
    for a in keys:
        for b in keys:
            if a != b:
                assert key_compatibility(a, b) < 1.0


def test_estimate_key_a_minor_arpeggio():
    # A3 C4 E4 A4: the tonic appears twice per cycle, so A minor beats the
    # relative C major under the tonic-weighted histogram score
    buf = signals.arpeggio([57, 60, 64, 69], note_seconds=0.25, repeats=4)
    key = estimate_key(buf)
    assert key == Key(9, "minor")


def test_estimate_key_c_major_scale_run():
    buf = signals.arpeggio([60, 62, 64, 65, 67, 69, 71, 72], note_seconds=0.2, repeats=2)
    key = estimate_key(buf)
    assert key.tonic == 0
    assert key.mode == "major"


def test_estimate_key_histogram_oracle():
    # histogram with A (2x), C, E -> A minor per the documented scoring rule
    hist = np.zeros(12)
    hist[9] = 2.0
    hist[0] = 1.0
    hist[4] = 1.0
    assert estimate_key_from_histogram(hist) == Key(9, "minor")


def test_estimate_key_empty_histogram_defaults_c_major():
    assert estimate_key_from_histogram(np.zeros(12)) == Key(0, "major")


def test_estimate_key_tie_breaks_lower_tonic_then_major():
    hist = np.zeros(12)
    hist[1] = 1.0  # C# alone: many scales contain it; C# major wins the tie
    key = estimate_key_from_histogram(hist)
    assert key == Key(1, "major")
