"""Runtime configuration.

Every tunable referenced by the other modules lives here: score weights,
role weights, session defaults, classifier thresholds, auth tokens.  Values
load from an optional JSON file and can be overridden per key by
environment variables prefixed ``BLOCKSTUDIO_`` (upper-cased field name;
values parse as JSON when possible, otherwise as plain strings).
"""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from ..attribution.settlement import DEFAULT_ROLE_WEIGHTS
from ..errors import ConfigError

ENV_PREFIX = "BLOCKSTUDIO_"


@dataclass
class Config:
    data_dir: str = "./blockstudio-data"
    host: str = "127.0.0.1"
    port: int = 8765

    # retrieval scoring
    score_weight_text: float = 0.6
    score_weight_bpm: float = 0.2
    score_weight_key: float = 0.2
    bpm_tolerance_fraction: float = 0.15
    min_key_compatibility: float = 0.6

    # session defaults
    default_bpm: float = 120.0
    default_key: str = "Cmaj"

    # attribution
    role_weights: dict = field(default_factory=lambda: dict(DEFAULT_ROLE_WEIGHTS))

    # classifier thresholds
    classify_drums_zcr: float = 3000.0
    classify_stable_pitch_ratio: float = 0.2
    classify_bass_centroid: float = 300.0
    classify_melody_centroid_low: float = 300.0
    classify_melody_centroid_high: float = 2000.0
    classify_melody_voiced_ratio: float = 0.6
    classify_melody_pitch_std: float = 0.5

    # segmentation
    segment_edge_fraction: float = 0.15

    # static bearer-token auth: token -> creator_id
    auth_tokens: dict = field(default_factory=dict)

    def score_weights(self) -> dict[str, float]:
        return {
            "text": self.score_weight_text,
            "bpm": self.score_weight_bpm,
            "key": self.score_weight_key,
        }

    def to_log_line(self) -> str:
        snapshot = asdict(self)
        snapshot["auth_tokens"] = {t: "***" for t in self.auth_tokens}
        return "config " + json.dumps(snapshot, sort_keys=True)


def _coerce(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def load_config(path: str | Path | None = None, env: dict | None = None) -> Config:
    """Build a Config from defaults, an optional JSON file, and env overrides."""
    values: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError(f"config file not found: {p}")
        try:
            values.update(json.loads(p.read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad config JSON: {exc}") from exc

    env = os.environ if env is None else env
    known = {f.name for f in fields(Config)}
    for name in known:
        env_key = ENV_PREFIX + name.upper()
        if env_key in env:
            values[name] = _coerce(env[env_key])

    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    try:
        return Config(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
