"""Settlement arithmetic: exact conservation, rule semantics."""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockstudio.attribution import (
    AttributionEvent,
    SettlementMethod,
    SettlementRule,
    aggregate_session,
    largest_remainder,
    settle,
)
from blockstudio.errors import NoQualifyingEvents

ROLE_WEIGHTS = {"prompt_audio": 1.0, "context_audio": 0.5,
                "symbolic_source": 0.75, "direct_inclusion": 1.0}


def make_event(i, creator, role="prompt_audio", session="s1", failed=False):
    return AttributionEvent(
        event_id=i,
        session_id=session,
        turn_id=1,
        block_id=f"b{i}",
        creator_id=creator,
        usage_role=role,
        weight=ROLE_WEIGHTS[role],
        turn_failed=failed,
        timestamp=float(i),
        prev_hash="0" * 64,
        event_hash="0" * 64,
    )


EQUAL = SettlementRule(method=SettlementMethod.EQUAL_SPLIT)
PRO_RATA = SettlementRule(method=SettlementMethod.WEIGHTED_PRO_RATA)


def test_aggregate_empty():
    assert aggregate_session([], "s1", PRO_RATA) == {}


def test_aggregate_single_prompt_audio_weight_one():
    events = [make_event(1, "alice")]
    assert aggregate_session(events, "s1", PRO_RATA) == {"alice": Fraction(1)}


def test_aggregate_default_weight_table_hand_sum():
    events = [
        make_event(1, "A", "prompt_audio"),
        make_event(2, "A", "context_audio"),
        make_event(3, "B", "prompt_audio"),
    ]
    got = aggregate_session(events, "s1", PRO_RATA)
    assert got == {"A": Fraction(3, 2), "B": Fraction(1)}


def test_aggregate_excludes_failed_turns_by_default():
    events = [make_event(1, "A"), make_event(2, "B", failed=True)]
    assert aggregate_session(events, "s1", PRO_RATA) == {"A": Fraction(1)}
    include = SettlementRule(
        method=SettlementMethod.WEIGHTED_PRO_RATA, include_failed_turns=True
    )
    assert aggregate_session(events, "s1", include) == {
        "A": Fraction(1), "B": Fraction(1)
    }


def test_equal_split_three_creators_largest_remainder():
    events = [make_event(1, "a"), make_event(2, "b"), make_event(3, "c")]
    report = settle(events, "s1", 1_000_000, EQUAL)
    assert report.shares == {"a": 333_334, "b": 333_333, "c": 333_333}
    assert sum(report.shares.values()) == 1_000_000


def test_single_creator_gets_full_pool():
    events = [make_event(1, "solo")]
    for rule in (EQUAL, PRO_RATA):
        report = settle(events, "s1", 777_777, rule)
        assert report.shares == {"solo": 777_777}


def test_pro_rata_exact_thirds():
    events = [
        make_event(1, "A"), make_event(2, "A"),  # weight 2.0
        make_event(3, "B"),                        # weight 1.0
    ]
    report = settle(events, "s1", 900_000, PRO_RATA)
    assert report.shares == {"A": 600_000, "B": 300_000}


def test_zero_pool_all_zero_shares():
    events = [make_event(1, "a"), make_event(2, "b")]
    report = settle(events, "s1", 0, EQUAL)
    assert report.shares == {"a": 0, "b": 0}
    assert sum(report.shares.values()) == 0


def test_no_qualifying_events_with_positive_pool():
    with pytest.raises(NoQualifyingEvents):
        settle([], "s1", 1_000, EQUAL)
    report = settle([], "s1", 0, EQUAL)
    assert report.shares == {}


def test_other_sessions_excluded():
    events = [make_event(1, "a"), make_event(2, "b", session="other")]
    report = settle(events, "s1", 100, EQUAL)
    assert report.shares == {"a": 100}


def test_largest_remainder_tie_breaks_by_creator_id():
    ideal = {"b": Fraction(1, 2), "a": Fraction(1, 2)}
    assert largest_remainder(ideal, 1) == {"a": 1, "b": 0}


@settings(max_examples=150, deadline=None)
@given(
    pool=st.integers(0, 10**12),
    creators=st.lists(
        st.tuples(st.sampled_from("abcdefgh"), st.sampled_from(list(ROLE_WEIGHTS))),
        min_size=1,
        max_size=24,
    ),
    method=st.sampled_from(list(SettlementMethod)),
)
def test_conservation_property(pool, creators, method):
    events = [make_event(i + 1, c, role) for i, (c, role) in enumerate(creators)]
    rule = SettlementRule(method=method)
    report = settle(events, "s1", pool, rule)
    assert sum(report.shares.values()) == pool
    distinct = {c for c, _ in creators}
    assert set(report.shares) == distinct
    if method is SettlementMethod.EQUAL_SPLIT:
        lo = pool // len(distinct)
        assert all(v in (lo, lo + 1) for v in report.shares.values())


@settings(max_examples=60, deadline=None)
@given(
    pool=st.integers(1, 10**9),
    base=st.lists(st.sampled_from("abcd"), min_size=1, max_size=10),
    extra_for=st.sampled_from("abcd"),
)
def test_monotone_fairness_pre_apportionment(pool, base, extra_for):
    events = [make_event(i + 1, c) for i, c in enumerate(base)]
    more = events + [make_event(len(events) + 1, extra_for)]
    rule = PRO_RATA
    before = aggregate_session(events, "s1", rule)
    after = aggregate_session(more, "s1", rule)
    total_before = sum(before.values(), Fraction(0))
    total_after = sum(after.values(), Fraction(0))
    frac_before = before.get(extra_for, Fraction(0)) / total_before
    frac_after = after[extra_for] / total_after
    assert frac_after >= frac_before


def test_pro_rata_matches_rational_oracle_within_one_microunit():
    events = [
        make_event(1, "A", "prompt_audio"),
        make_event(2, "B", "context_audio"),
        make_event(3, "C", "symbolic_source"),
        make_event(4, "A", "direct_inclusion"),
    ]
    pool = 1_000_003
    report = settle(events, "s1", pool, PRO_RATA)
    weights = {"A": Fraction(2), "B": Fraction(1, 2), "C": Fraction(3, 4)}
    total = sum(weights.values())
    for creator, share in report.shares.items():
        ideal = Fraction(pool) * weights[creator] / total
        assert abs(Fraction(share) - ideal) < 1


def test_reports_are_pure_functions_of_inputs():
    events = [make_event(1, "a"), make_event(2, "b", "context_audio")]
    r1 = settle(events, "s1", 12345, PRO_RATA)
    r2 = settle(events, "s1", 12345, PRO_RATA)
    assert r1 == r2
    assert r1.to_dict() == r2.to_dict()


def test_rule_rejects_nonpositive_weights():
    with pytest.raises(ValueError):
        SettlementRule(role_weights={"prompt_audio": 0.0})
