"""Process boundary: HTTP API, persistence wiring, configuration, CLI."""

from .config import Config, load_config
from .state import AppState, SessionStore, SettlementStore

__all__ = ["AppState", "Config", "SessionStore", "SettlementStore", "load_config"]
