"""Creator analytics assembled by replaying the ledger and settlement store."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .ledger import AttributionEvent
from .settlement import SettlementReport


@dataclass(frozen=True)
class CreatorReport:
    """Usage and earnings for one creator over a time range."""

    creator_id: str
    usage_by_block: Mapping[str, Mapping[str, int]]  # block_id -> role -> count
    total_events: int
    total_earned_microunits: int
    time_from: float | None = None
    time_to: float | None = None

    def to_dict(self) -> dict:
        return {
            "creator_id": self.creator_id,
            "usage_by_block": {
                b: dict(sorted(roles.items()))
                for b, roles in sorted(self.usage_by_block.items())
            },
            "total_events": self.total_events,
            "total_earned_microunits": self.total_earned_microunits,
            "time_from": self.time_from,
            "time_to": self.time_to,
        }


@dataclass(frozen=True)
class StoredSettlement:
    """A persisted settlement report plus the time it was produced."""

    report: SettlementReport
    settled_at: float


def creator_report(
    events: Iterable[AttributionEvent],
    settlements: Iterable[StoredSettlement],
    creator_id: str,
    time_from: float | None = None,
    time_to: float | None = None,
) -> CreatorReport:
    """Replay usage counts and sum earned shares within [time_from, time_to].

    Unknown creators get an all-zero report.
    """

    def in_range(ts: float) -> bool:
        if time_from is not None and ts < time_from:
            return False
        if time_to is not None and ts > time_to:
            return False
        return True

    usage: dict[str, dict[str, int]] = {}
    total_events = 0
    for event in events:
        if event.creator_id != creator_id or not in_range(event.timestamp):
            continue
        roles = usage.setdefault(event.block_id, {})
        roles[event.usage_role] = roles.get(event.usage_role, 0) + 1
        total_events += 1

    earned = 0
    for stored in settlements:
        if not in_range(stored.settled_at):
            continue
        earned += stored.report.shares.get(creator_id, 0)

    return CreatorReport(
        creator_id=creator_id,
        usage_by_block=usage,
        total_events=total_events,
        total_earned_microunits=earned,
        time_from=time_from,
        time_to=time_to,
    )
