"""Scenario configuration, discovery-zone time geometry and the fluid ledger.

Indices follow the protocol convention: DZs are numbered ``1..K`` and
transmission attempts ``1..L_max``.  Array storage is zero-based, so the
count for DZ ``i`` and attempt ``l`` lives at ``ledger.m[i - 1, l - 1]``.
"""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from enum import Enum

import numpy as np


class SuccessMode(str, Enum):
    """How the fluid model thins each attempt-group by collisions.

    ``literal`` applies the balls-and-bins factor to each attempt-group on its
    own; ``coupled`` uses the whole DZ population in the exponent, so groups
    sharing a zone collide with each other.
    """

    LITERAL = "literal"
    COUPLED = "coupled"


class ConfigError(ValueError):
    """Raised when a scenario violates a configuration invariant."""

    def __init__(self, field_name: str, message: str):
        self.field_name = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass(frozen=True)
class ScenarioConfig:
    total_ues: int = 450
    resources: int = 22
    dz_length: float = 0.030
    dz_interval: float = 10.0
    dz_count: int = 20
    max_transmissions: int = 3
    backoff_window: int = 3
    processing_delay: float = 0.005
    alpha: float = 3.0
    beta: float = 4.0
    success_mode: SuccessMode = SuccessMode.LITERAL
    eq15_weighting: bool = False

    def __post_init__(self):
        # accept the plain string spelling of the mode
        if not isinstance(self.success_mode, SuccessMode):
            try:
                object.__setattr__(self, "success_mode", SuccessMode(self.success_mode))
            except ValueError:
                raise ConfigError(
                    "success_mode",
                    f"must be one of {[m.value for m in SuccessMode]}, got {self.success_mode!r}",
                ) from None

    @property
    def period(self) -> float:
        """Length of one discovery period, gap plus zone."""
        return self.dz_interval + self.dz_length

    def with_(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


CONFIG_FIELDS = tuple(f.name for f in fields(ScenarioConfig))


def validate(config: ScenarioConfig) -> ScenarioConfig:
    """Return ``config`` unchanged if every invariant holds, else raise ConfigError."""
    for name in ("resources", "dz_count", "max_transmissions", "backoff_window"):
        value = getattr(config, name)
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise ConfigError(name, f"must be an integer, got {value!r}")
        if value < 1:
            raise ConfigError(name, f"{name} must be ≥ 1, got {value}")
    if isinstance(config.total_ues, bool) or not isinstance(config.total_ues, (int, np.integer)):
        raise ConfigError("total_ues", f"must be an integer, got {config.total_ues!r}")
    if config.total_ues < 0:
        raise ConfigError("total_ues", f"total_ues must be ≥ 0, got {config.total_ues}")
    for name in ("dz_length", "dz_interval", "processing_delay"):
        value = getattr(config, name)
        if not np.isfinite(value) or value <= 0:
            raise ConfigError(name, f"{name} must be a positive duration, got {value!r}")
    for name in ("alpha", "beta"):
        value = getattr(config, name)
        if not np.isfinite(value) or value <= 0:
            raise ConfigError(name, f"{name} must be > 0, got {value!r}")
    if config.backoff_window > config.dz_count:
        raise ConfigError(
            "backoff_window",
            f"backoff_window ({config.backoff_window}) exceeds dz_count ({config.dz_count})",
        )
    if not isinstance(config.eq15_weighting, bool):
        raise ConfigError("eq15_weighting", f"must be a boolean, got {config.eq15_weighting!r}")
    return config


@dataclass(frozen=True)
class DzTimeline:
    """Start/end times of the K zones.  A gap of ``dz_interval`` precedes each zone."""

    dz_interval: float
    dz_length: float
    dz_count: int

    def dz_start(self, i: int) -> float:
        self._check(i)
        return i * self.dz_interval + (i - 1) * self.dz_length

    def dz_end(self, i: int) -> float:
        self._check(i)
        return i * (self.dz_interval + self.dz_length)

    @property
    def horizon(self) -> float:
        return self.dz_count * self.dz_interval + (self.dz_count - 1) * self.dz_length

    def arrival_window(self, i: int) -> tuple[float, float]:
        """Interval whose arrivals first contend in DZ(i): previous zone start to this one."""
        self._check(i)
        lower = 0.0 if i == 1 else self.dz_start(i - 1)
        return lower, self.dz_start(i)

    def window_edges(self) -> np.ndarray:
        """``K + 1`` edges ``0, dz_start(1), ..., dz_start(K)`` tiling ``[0, horizon]``."""
        i = np.arange(1, self.dz_count + 1)
        starts = i * self.dz_interval + (i - 1) * self.dz_length
        return np.concatenate(([0.0], starts))

    def _check(self, i: int) -> None:
        if not 1 <= i <= self.dz_count:
            raise IndexError(f"DZ index {i} outside 1..{self.dz_count}")


def timeline(config: ScenarioConfig) -> DzTimeline:
    return DzTimeline(config.dz_interval, config.dz_length, config.dz_count)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class TransmissionLedger:
    """Real-valued (K, L_max) matrices of the fluid recursion.

    ``m`` holds UEs making their l-th transmission in DZ(i), ``m_s`` the
    expected successes and ``m_f = m - m_s`` the failures.  ``completed`` is the
    number of leading DZ rows already filled.
    """

    m: np.ndarray
    m_s: np.ndarray
    m_f: np.ndarray
    completed: int = 0

    def __post_init__(self):
        for name in ("m", "m_s", "m_f"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if not (self.m.shape == self.m_s.shape == self.m_f.shape) or self.m.ndim != 2:
            raise ValueError("ledger matrices must share one (K, L_max) shape")

    @classmethod
    def empty(cls, dz_count: int, max_transmissions: int) -> "TransmissionLedger":
        z = np.zeros((dz_count, max_transmissions))
        return cls(z, z, z, 0)

    @property
    def dz_count(self) -> int:
        return self.m.shape[0]

    @property
    def max_transmissions(self) -> int:
        return self.m.shape[1]

    def with_row(self, i: int, m_row, m_s_row, m_f_row) -> "TransmissionLedger":
        if i != self.completed + 1:
            raise RuntimeError(
                f"DZ rows must be filled in order: expected row {self.completed + 1}, got {i}"
            )
        m, m_s, m_f = (a.copy() for a in (self.m, self.m_s, self.m_f))
        m[i - 1], m_s[i - 1], m_f[i - 1] = m_row, m_s_row, m_f_row
        return TransmissionLedger(m, m_s, m_f, i)


__all__ = [
    "CONFIG_FIELDS",
    "ConfigError",
    "DzTimeline",
    "ScenarioConfig",
    "SuccessMode",
    "TransmissionLedger",
    "timeline",
    "validate",
]
