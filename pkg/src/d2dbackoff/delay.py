"""Mean discovery delay of the fluid model and the delay-per-discovery tradeoff."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .analytic import cumulative_discovered, success_weights
from .core import ScenarioConfig, TransmissionLedger, timeline
from .traffic import ArrivalProfile, mean_arrival_time


class UndefinedDelayError(ArithmeticError):
    """No UE was discovered, so the success-weighted mean delay does not exist."""


def mean_backoff_time(backoff_window: int, dz_interval: float, dz_length: float) -> float:
    """Mean wait of a uniform backoff over 1..W whole periods."""
    if backoff_window < 1:
        raise ValueError("backoff_window must be ≥ 1")
    W = backoff_window
    return sum(w * (dz_interval + dz_length) for w in range(1, W + 1)) / W


def attempt_delay(l: int, config: ScenarioConfig, mean_arrival: float) -> float:
    if not 1 <= l <= config.max_transmissions:
        raise IndexError(f"attempt {l} outside 1..{config.max_transmissions}")
    t_bo = mean_backoff_time(config.backoff_window, config.dz_interval, config.dz_length)
    return mean_arrival + (l - 1) * t_bo + config.processing_delay


@dataclass(frozen=True)
class DelayReport:
    mean_backoff: float
    mean_arrival: float
    per_attempt_delay: np.ndarray  # indexed by attempt l-1; identical for every DZ
    average_delay: float
    tradeoff: float
    per_dz_delay: np.ndarray  # NaN where a DZ has no successes

    def attempt_delay_matrix(self, dz_count: int) -> np.ndarray:
        """The (L_max, K) view of the per-attempt delay."""
        return np.repeat(self.per_attempt_delay[:, None], dz_count, axis=1)


def average_delay(
    ledger: TransmissionLedger,
    config: ScenarioConfig,
    profile: ArrivalProfile,
) -> DelayReport:
    """Success-weighted mean of the per-attempt delays over the whole ledger."""
    t_ar = mean_arrival_time(profile, timeline(config), config.dz_count)
    t_bo = mean_backoff_time(config.backoff_window, config.dz_interval, config.dz_length)
    deltas = np.array([attempt_delay(l, config, t_ar) for l in range(1, config.max_transmissions + 1)])
    total = ledger.m_s.sum()
    if total <= 0:
        raise UndefinedDelayError("no UE discovered; average delay undefined")
    d_bar = float((ledger.m_s @ deltas).sum() / total)

    if config.eq15_weighting:
        W = config.backoff_window
        w = success_weights(config.max_transmissions)
        discovered = float((ledger.m_s[W:] @ w).sum() + ledger.m_s[:W, 0].sum() * w[0])
    else:
        discovered = cumulative_discovered(ledger, config.backoff_window)

    row_total = ledger.m_s.sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        per_dz = np.where(row_total > 0, (ledger.m_s @ deltas) / row_total, np.nan)
    return DelayReport(
        mean_backoff=t_bo,
        mean_arrival=t_ar,
        per_attempt_delay=deltas,
        average_delay=d_bar,
        tradeoff=d_bar / discovered,
        per_dz_delay=per_dz,
    )
