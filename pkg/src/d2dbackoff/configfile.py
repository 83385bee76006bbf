"""Flat ``key=value`` scenario files.

Keys are exactly the ScenarioConfig field names; ``#`` starts a comment.
"""
from __future__ import annotations

from dataclasses import fields
from enum import Enum
from pathlib import Path

from .core import CONFIG_FIELDS, ScenarioConfig, SuccessMode, validate

_INT_FIELDS = {"total_ues", "resources", "dz_count", "max_transmissions", "backoff_window"}
_BOOL_FIELDS = {"eq15_weighting"}
_TRUE = {"true", "1", "yes", "on"}
_FALSE = {"false", "0", "no", "off"}


class ConfigParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip())


def coerce(key: str, raw: str):
    """Convert a textual value to the type of config field ``key``."""
    if key not in CONFIG_FIELDS:
        raise KeyError(key)
    text = raw.strip()
    if key in _INT_FIELDS:
        return int(text)
    if key in _BOOL_FIELDS:
        low = text.lower()
        if low in _TRUE:
            return True
        if low in _FALSE:
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if key == "success_mode":
        return SuccessMode(text)
    return float(text)


def parse_text(text: str, source: str | None = None) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigParseError(f"expected key=value, got {body!r}", lineno, source)
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in CONFIG_FIELDS:
            raise ConfigParseError(f"unknown key {key!r}", lineno, source)
        try:
            values[key] = coerce(key, raw)
        except ValueError as exc:
            raise ConfigParseError(f"bad value for {key!r}: {exc}", lineno, source) from None
    return values


def parse_config(
    path: str | Path | None = None,
    overrides: dict | None = None,
    base: ScenarioConfig | None = None,
) -> ScenarioConfig:
    """``base`` (default scenario if omitted), then file values, then non-None ``overrides``."""
    values = config_dict(base) if base is not None else {}
    if path is not None:
        p = Path(path)
        values.update(parse_text(p.read_text(encoding="utf-8"), str(p)))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in CONFIG_FIELDS:
            raise ConfigParseError(f"unknown key {key!r}")
        values[key] = value
    return validate(ScenarioConfig(**values))


def format_value(value) -> str:
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def dump_config(config: ScenarioConfig) -> str:
    """Serialise ``config`` so that ``parse_text`` reproduces it exactly."""
    return "".join(f"{f.name}={format_value(getattr(config, f.name))}\n" for f in fields(config))


def config_dict(config: ScenarioConfig) -> dict:
    out = {}
    for f in fields(config):
        v = getattr(config, f.name)
        out[f.name] = v.value if isinstance(v, Enum) else v
    return out
