"""Attribution layer: hash-chained event ledger, settlement, analytics."""

from .ledger import (
    GENESIS_HASH,
    USAGE_ROLES,
    AttributionEvent,
    Ledger,
    event_to_line,
    replay,
    replay_file,
    verify_chain,
    verify_chain_file,
)
from .reports import CreatorReport, StoredSettlement, creator_report
from .settlement import (
    DEFAULT_ROLE_WEIGHTS,
    MICROUNITS_PER_UNIT,
    SettlementMethod,
    SettlementReport,
    SettlementRule,
    aggregate_session,
    largest_remainder,
    settle,
)

__all__ = [
    "AttributionEvent",
    "CreatorReport",
    "DEFAULT_ROLE_WEIGHTS",
    "GENESIS_HASH",
    "Ledger",
    "MICROUNITS_PER_UNIT",
    "SettlementMethod",
    "SettlementReport",
    "SettlementRule",
    "StoredSettlement",
    "USAGE_ROLES",
    "aggregate_session",
    "creator_report",
    "event_to_line",
    "largest_remainder",
    "replay",
    "replay_file",
    "settle",
    "verify_chain",
    "verify_chain_file",
]
