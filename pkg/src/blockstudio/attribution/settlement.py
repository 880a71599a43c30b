"""Royalty settlement: divide a session's pool among creators exactly.

Pools are integers in micro-units (1 pool unit = 1,000,000 micro-units).
Both rules apportion with the largest-remainder method over exact rational
arithmetic, so the shares always sum to the pool precisely.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from ..errors import NoQualifyingEvents
from .ledger import AttributionEvent

MICROUNITS_PER_UNIT = 1_000_000

DEFAULT_ROLE_WEIGHTS = {
    "prompt_audio": 1.0,
    "context_audio": 0.5,
    "symbolic_source": 0.75,
    "direct_inclusion": 1.0,
}


class SettlementMethod(str, enum.Enum):
    EQUAL_SPLIT = "equal_split"
    WEIGHTED_PRO_RATA = "weighted_pro_rata"


@dataclass(frozen=True)
class SettlementRule:
    """Named division rule plus the policy knobs it was run with."""

    method: SettlementMethod = SettlementMethod.WEIGHTED_PRO_RATA
    role_weights: Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_ROLE_WEIGHTS)
    )
    include_failed_turns: bool = False

    def __post_init__(self):
        for role, weight in self.role_weights.items():
            if weight <= 0:
                raise ValueError(f"role weight for {role} must be positive")

    def to_dict(self) -> dict:
        return {
            "method": self.method.value,
            "role_weights": dict(self.role_weights),
            "include_failed_turns": self.include_failed_turns,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SettlementRule":
        return cls(
            method=SettlementMethod(data["method"]),
            role_weights=dict(data["role_weights"]),
            include_failed_turns=bool(data["include_failed_turns"]),
        )


@dataclass(frozen=True)
class SettlementReport:
    session_id: str
    rule: SettlementRule
    pool_microunits: int
    shares: Mapping[str, int]
    event_count: int

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "rule": self.rule.to_dict(),
            "pool_microunits": self.pool_microunits,
            "shares": dict(sorted(self.shares.items())),
            "event_count": self.event_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SettlementReport":
        return cls(
            session_id=data["session_id"],
            rule=SettlementRule.from_dict(data["rule"]),
            pool_microunits=int(data["pool_microunits"]),
            shares={k: int(v) for k, v in data["shares"].items()},
            event_count=int(data["event_count"]),
        )


def qualifying_events(
    events: Iterable[AttributionEvent], session_id: str, rule: SettlementRule
) -> list[AttributionEvent]:
    return [
        e
        for e in events
        if e.session_id == session_id
        and (rule.include_failed_turns or not e.turn_failed)
    ]


def aggregate_session(
    events: Iterable[AttributionEvent], session_id: str, rule: SettlementRule
) -> dict[str, Fraction]:
    """Sum recorded event weights per creator over qualifying events."""
    totals: dict[str, Fraction] = {}
    for event in qualifying_events(events, session_id, rule):
        weight = Fraction(repr(event.weight))
        totals[event.creator_id] = totals.get(event.creator_id, Fraction(0)) + weight
    return totals


def largest_remainder(ideal: Mapping[str, Fraction], pool: int) -> dict[str, int]:
    """Integer apportionment: floors first, leftovers by descending remainder
    with ties broken by creator_id ascending.  Conserves the pool exactly."""
    floors = {c: int(v) for c, v in ideal.items()}
    leftover = pool - sum(floors.values())
    order = sorted(ideal, key=lambda c: (-(ideal[c] - floors[c]), c))
    shares = dict(floors)
    for c in order[:leftover]:
        shares[c] += 1
    return shares


def settle(
    events: Iterable[AttributionEvent],
    session_id: str,
    pool_microunits: int,
    rule: SettlementRule,
) -> SettlementReport:
    """Divide the pool under the rule; the shares sum to the pool exactly.

    EqualSplit divides the pool over the distinct qualifying creators;
    WeightedProRata divides it proportionally to aggregated event weights.
    """
    if pool_microunits < 0:
        raise ValueError("pool must be non-negative")
    qualifying = qualifying_events(events, session_id, rule)
    weights = aggregate_session(events, session_id, rule)
    if not weights:
        if pool_microunits > 0:
            raise NoQualifyingEvents(
                f"no qualifying events for session {session_id}"
            )
        return SettlementReport(session_id, rule, 0, {}, 0)

    pool = int(pool_microunits)
    if rule.method is SettlementMethod.EQUAL_SPLIT:
        n = len(weights)
        ideal = {c: Fraction(pool, n) for c in weights}
    else:
        total = sum(weights.values(), Fraction(0))
        ideal = {c: Fraction(pool) * w / total for c, w in weights.items()}
    shares = largest_remainder(ideal, pool)
    return SettlementReport(
        session_id=session_id,
        rule=rule,
        pool_microunits=pool,
        shares=shares,
        event_count=len(qualifying),
    )
