"""Flat key=value configuration: parsing, canonical echo, stable hashing.

The config grammar is one `key = value` per line with `#` comments and
dotted namespaces (`td3.gamma = 0.99`). Unknown keys are rejected so a
typo cannot silently fall back to a default. The canonical echo is the
same grammar, which makes run files self-describing: their comment header
re-parses to the exact TrainConfig that produced them.

The config hash identifies a configuration across seeds, so the seed key
is excluded from it; hashes appear in result filenames for grouping.
"""

from __future__ import annotations

import hashlib
import math
from pathlib import Path
from typing import Callable, Iterable

from .trainer import TrainConfig


class ConfigError(ValueError):
    """Malformed config text or invalid key/value; message names the key."""


def _parse_int(s: str) -> int:
    return int(s)


def _parse_float(s: str) -> float:
    v = float(s)
    if math.isnan(v):
        raise ValueError("NaN is not a valid config value")
    return v


def _parse_bool(s: str) -> bool:
    low = s.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    raise ValueError(f"expected true or false, got {s!r}")


def _parse_int_tuple(s: str) -> tuple[int, ...]:
    parts = [p.strip() for p in s.split(",") if p.strip()]
    if not parts:
        raise ValueError("expected a comma-separated list of integers")
    return tuple(int(p) for p in parts)


def _fmt_int(v: int) -> str:
    return str(v)


def _fmt_float(v: float) -> str:
    return repr(float(v))


def _fmt_bool(v: bool) -> str:
    return "true" if v else "false"


def _fmt_int_tuple(v: tuple[int, ...]) -> str:
    return ",".join(str(x) for x in v)


# key -> (TrainConfig field, parser, formatter)
KEY_SPECS: dict[str, tuple[str, Callable, Callable]] = {
    "seed": ("seed", _parse_int, _fmt_int),
    "total_env_steps": ("total_env_steps", _parse_int, _fmt_int),
    "update_every": ("update_every", _parse_int, _fmt_int),
    "updates_per_cycle": ("updates_per_cycle", _parse_int, _fmt_int),
    "policy_data_multiplier": ("policy_data_multiplier", _parse_int, _fmt_int),
    "batch_size": ("batch_size", _parse_int, _fmt_int),
    "buffer.capacity": ("buffer_capacity", _parse_int, _fmt_int),
    "daf.kind": ("daf_kind", str, str),
    "daf.p": ("daf_p", _parse_float, _fmt_float),
    "aug.m": ("aug_m", _parse_int, _fmt_int),
    "aug.alpha": ("aug_alpha", _parse_float, _fmt_float),
    "aug.every_n_observed": ("aug_every_n_observed", _parse_int, _fmt_int),
    "eval.every_steps": ("eval_every_steps", _parse_int, _fmt_int),
    "eval.episodes": ("eval_episodes", _parse_int, _fmt_int),
    "td3.hidden_sizes": ("td3_hidden_sizes", _parse_int_tuple, _fmt_int_tuple),
    "td3.gamma": ("td3_gamma", _parse_float, _fmt_float),
    "td3.learning_rate": ("td3_learning_rate", _parse_float, _fmt_float),
    "td3.tau": ("td3_tau", _parse_float, _fmt_float),
    "td3.policy_noise_std": ("td3_policy_noise_std", _parse_float, _fmt_float),
    "td3.noise_clip": ("td3_noise_clip", _parse_float, _fmt_float),
    "td3.policy_delay": ("td3_policy_delay", _parse_int, _fmt_int),
    "td3.gaussian_sigma": ("td3_gaussian_sigma", _parse_float, _fmt_float),
    "td3.random_action_prob": ("td3_random_action_prob", _parse_float, _fmt_float),
    "td3.warmup_steps": ("td3_warmup_steps", _parse_int, _fmt_int),
    "env.horizon": ("env_horizon", _parse_int, _fmt_int),
    "env.terminate_on_success": ("env_terminate_on_success", _parse_bool, _fmt_bool),
    "env.clip_positions": ("env_clip_positions", _parse_bool, _fmt_bool),
}

_FIELD_TO_KEY = {field: key for key, (field, _, _) in KEY_SPECS.items()}


def _split_line(line: str, lineno: int | None) -> tuple[str, str] | None:
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    if "=" not in text:
        where = f" at line {lineno}" if lineno else ""
        raise ConfigError(f"expected key = value{where}: {line.strip()!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


def _parse_pair(key: str, value: str, lineno: int | None) -> tuple[str, object]:
    where = f" at line {lineno}" if lineno else ""
    if key not in KEY_SPECS:
        raise ConfigError(f"unknown config key {key!r}{where}")
    field, parser, _ = KEY_SPECS[key]
    try:
        return field, parser(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}{where}: {exc}") from None


def parse_config_text(text: str, overrides: Iterable[str] = ()) -> TrainConfig:
    fields: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        pair = _split_line(line, lineno)
        if pair is None:
            continue
        field, value = _parse_pair(pair[0], pair[1], lineno)
        fields[field] = value
    for item in overrides:
        pair = _split_line(item, None)
        if pair is None:
            raise ConfigError(f"override must be key=value, got {item!r}")
        field, value = _parse_pair(pair[0], pair[1], None)
        fields[field] = value
    try:
        return TrainConfig(**fields)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def parse_config(path: str | Path | None, overrides: Iterable[str] = ()) -> TrainConfig:
    """Resolve a config file (or defaults when path is None) plus overrides."""
    text = "" if path is None else Path(path).read_text()
    return parse_config_text(text, overrides)


def canonical_items(cfg: TrainConfig, include_seed: bool = True) -> list[tuple[str, str]]:
    """(key, canonical value) pairs sorted by key; the echo format."""
    items = []
    for key in sorted(KEY_SPECS):
        if key == "seed" and not include_seed:
            continue
        field, _, formatter = KEY_SPECS[key]
        items.append((key, formatter(getattr(cfg, field))))
    return items


def config_from_items(items: dict[str, str]) -> TrainConfig:
    """Rebuild a TrainConfig from echoed key/value strings."""
    fields = {}
    for key, value in items.items():
        field, parsed = _parse_pair(key, value, None)
        fields[field] = parsed
    return TrainConfig(**fields)


def config_hash(cfg: TrainConfig) -> str:
    """Stable short hash over every config key except the seed."""
    blob = "\n".join(f"{k}={v}" for k, v in canonical_items(cfg, include_seed=False))
    return hashlib.sha256(blob.encode()).hexdigest()[:12]
