"""Fluid recursion for random-backoff discovery.

Each DZ row of the ledger is built from the new arrivals plus the failed
mass of the previous ``W`` zones, spread evenly over the backoff window, and
then thinned by the balls-and-bins singleton expectation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ScenarioConfig, SuccessMode, TransmissionLedger, validate
from .traffic import ArrivalProfile, arrival_profile, new_arrivals


def expected_success(m: float, r: float) -> float:
    """Expected number of singleton bins when ``m`` balls fall into ``r`` bins.

    ``m * (1 - 1/r)**(m - 1)``.  For fractional ``0 < m < 1`` the exponent is
    clamped at zero so a sub-unit fluid mass never yields more successes than
    it holds.
    """
    if m < 0:
        raise ValueError(f"ball count must be non-negative, got {m}")
    if r < 1:
        raise ValueError(f"bin count must be ≥ 1, got {r}")
    if m == 0:
        return 0.0
    return m * collision_factor(m, r)


def collision_factor(m: float, r: float) -> float:
    """Probability a given ball is alone, ``(1 - 1/r)**max(m - 1, 0)``."""
    if r == 1:
        return 1.0 if m <= 1 else 0.0
    return math.exp(max(m - 1.0, 0.0) * math.log1p(-1.0 / r))


def success_weights(max_transmissions: int) -> np.ndarray:
    """Per-attempt success weighting ``P_S(l) = 1 - exp(-l)``, l = 1..L_max."""
    return 1.0 - np.exp(-np.arange(1, max_transmissions + 1, dtype=float))


def retransmission_inflow(i: int, ledger: TransmissionLedger, backoff_window: int) -> np.ndarray:
    """Mass arriving at DZ(i) for attempts 2..L_max from the previous W zones."""
    L = ledger.max_transmissions
    inflow = np.zeros(L)
    if i <= backoff_window or L == 1:
        # no retransmissions inside the first W zones
        return inflow
    W = backoff_window
    window = ledger.m_f[i - 1 - W : i - 1, : L - 1]
    inflow[1:] = window.sum(axis=0) / W
    return inflow


def step_dz(
    i: int,
    ledger: TransmissionLedger,
    config: ScenarioConfig,
    profile: ArrivalProfile,
) -> TransmissionLedger:
    """Fill row ``i`` of the ledger; rows ``1..i-1`` must already be complete."""
    if ledger.completed != i - 1:
        raise RuntimeError(
            f"step_dz({i}) called with {ledger.completed} completed rows; DZs must be stepped in order"
        )
    m_row = retransmission_inflow(i, ledger, config.backoff_window)
    m_row[0] = new_arrivals(i, config, profile)
    R = config.resources
    if config.success_mode is SuccessMode.LITERAL:
        m_s_row = np.array([expected_success(x, R) for x in m_row])
    else:
        m_s_row = m_row * collision_factor(float(m_row.sum()), R)
    m_f_row = m_row - m_s_row
    return ledger.with_row(i, m_row, m_s_row, m_f_row)


def run_ledger(config: ScenarioConfig, profile: ArrivalProfile | None = None) -> TransmissionLedger:
    validate(config)
    if profile is None:
        profile = arrival_profile(config)
    ledger = TransmissionLedger.empty(config.dz_count, config.max_transmissions)
    for i in range(1, config.dz_count + 1):
        ledger = step_dz(i, ledger, config, profile)
    return ledger


@dataclass(frozen=True)
class MassBalance:
    """Where the arrival mass ended up after K zones.

    ``exhausted`` failed their L_max-th transmission; ``suppressed`` were
    scheduled into one of the first W zones, where retransmission is not
    modelled; ``pending`` were scheduled past DZ(K).
    """

    arrivals: float
    discovered: float
    exhausted: float
    suppressed: float
    pending: float
    exhausted_per_dz: np.ndarray
    suppressed_per_dz: np.ndarray
    pending_per_dz: np.ndarray

    @property
    def residual(self) -> float:
        return self.arrivals - (self.discovered + self.exhausted + self.suppressed + self.pending)


def mass_balance(ledger: TransmissionLedger, config: ScenarioConfig) -> MassBalance:
    K, L, W = ledger.dz_count, ledger.max_transmissions, config.backoff_window
    exhausted = ledger.m_f[:, L - 1].copy()
    suppressed = np.zeros(K)
    pending = np.zeros(K)
    if L > 1:
        retry = ledger.m_f[:, : L - 1].sum(axis=1) / W
        for g in range(1, K + 1):
            for w in range(1, W + 1):
                target = g + w
                if target > K:
                    pending[g - 1] += retry[g - 1]
                elif target <= W:
                    suppressed[g - 1] += retry[g - 1]
    return MassBalance(
        arrivals=float(ledger.m[:, 0].sum()),
        discovered=float(ledger.m_s.sum()),
        exhausted=float(exhausted.sum()),
        suppressed=float(suppressed.sum()),
        pending=float(pending.sum()),
        exhausted_per_dz=exhausted,
        suppressed_per_dz=suppressed,
        pending_per_dz=pending,
    )


@dataclass(frozen=True)
class AnalyticReport:
    config: ScenarioConfig
    profile: ArrivalProfile
    ledger: TransmissionLedger
    per_dz_total: np.ndarray
    per_dz_success_raw: np.ndarray
    per_dz_success_eq15: np.ndarray
    cumulative_success_raw: float
    cumulative_success_eq15: float
    balance: MassBalance

    @property
    def per_dz_success(self) -> np.ndarray:
        return self.per_dz_success_eq15 if self.config.eq15_weighting else self.per_dz_success_raw

    @property
    def cumulative_success(self) -> float:
        if self.config.eq15_weighting:
            return self.cumulative_success_eq15
        return self.cumulative_success_raw

    @property
    def discovery_probability(self) -> float:
        M = self.config.total_ues
        return self.cumulative_success / M if M else 0.0


def cumulative_discovered(ledger: TransmissionLedger, backoff_window: int) -> float:
    """Total successes over the horizon: first attempts only for DZs 1..W, all attempts after."""
    W = min(backoff_window, ledger.dz_count)
    head = ledger.m_s[:W, 0].sum()
    tail = ledger.m_s[W:, :].sum()
    return float(head + tail)


def run_analytic(config: ScenarioConfig, profile: ArrivalProfile | None = None) -> AnalyticReport:
    validate(config)
    if profile is None:
        profile = arrival_profile(config)
    ledger = run_ledger(config, profile)
    weights = success_weights(config.max_transmissions)
    per_raw = ledger.m_s.sum(axis=1)
    per_eq15 = ledger.m_s @ weights
    W = config.backoff_window
    cum_eq15 = float(per_eq15[W:].sum() + ledger.m_s[:W, 0].sum() * weights[0])
    return AnalyticReport(
        config=config,
        profile=profile,
        ledger=ledger,
        per_dz_total=ledger.m.sum(axis=1),
        per_dz_success_raw=per_raw,
        per_dz_success_eq15=per_eq15,
        cumulative_success_raw=cumulative_discovered(ledger, W),
        cumulative_success_eq15=cum_eq15,
        balance=mass_balance(ledger, config),
    )
