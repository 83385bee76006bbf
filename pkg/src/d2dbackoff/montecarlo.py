"""Agent-level simulation of random-backoff discovery.

Every UE activates at a beta-distributed time, contends in the next DZ by
picking one of R resources uniformly, succeeds only when alone on it, and
otherwise backs off ``W_BO ~ U{1..W}`` zones, giving up after L_max
transmissions.

Randomness comes from a Philox generator tree rooted at the run seed: one
stream for activation times and, per DZ, one stream for resource picks and
one for backoff draws.  A DZ's draws therefore do not depend on how many
numbers earlier zones consumed.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import ScenarioConfig, timeline, validate
from .traffic import ArrivalProfile, arrival_profile


class Outcome(str, Enum):
    PENDING = "pending"
    DISCOVERED = "discovered"
    DROPPED = "dropped"


@dataclass
class UeRecord:
    ue_id: int
    arrival_time: float
    arrival_dz: int
    attempts: int = 0
    backoff_draws: list[int] = field(default_factory=list)
    outcome: Outcome = Outcome.PENDING
    success_dz: int | None = None
    next_dz: int | None = None
    delay: float | None = None


@dataclass(frozen=True)
class RunStreams:
    arrivals: np.random.Generator
    contention: tuple[np.random.Generator, ...]
    backoff: tuple[np.random.Generator, ...]


def _philox(ss: np.random.SeedSequence) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(ss))


def run_streams(seed: int, dz_count: int) -> RunStreams:
    root = np.random.SeedSequence(seed)
    arr_ss, cont_ss, bo_ss = root.spawn(3)
    return RunStreams(
        arrivals=_philox(arr_ss),
        contention=tuple(_philox(s) for s in cont_ss.spawn(dz_count)),
        backoff=tuple(_philox(s) for s in bo_ss.spawn(dz_count)),
    )


def sole_occupants(bins: np.ndarray, r: int) -> np.ndarray:
    """Boolean mask of balls that are alone in their bin (last axis = one throw)."""
    bins = np.asarray(bins)
    if bins.ndim == 1:
        counts = np.bincount(bins, minlength=r)
        return counts[bins] == 1
    rows = bins.shape[0]
    flat = (bins + r * np.arange(rows)[:, None]).ravel()
    counts = np.bincount(flat, minlength=rows * r)
    return (counts[flat] == 1).reshape(bins.shape)


def singleton_trials(
    m: int, r: int, trials: int, rng: np.random.Generator, chunk: int = 10_000
) -> np.ndarray:
    """Number of lone balls in each of ``trials`` independent throws of m balls into r bins."""
    out = np.empty(trials, dtype=np.int64)
    if m == 0:
        out[:] = 0
        return out
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        bins = rng.integers(0, r, size=(n, m))
        out[done : done + n] = sole_occupants(bins, r).sum(axis=1)
        done += n
    return out


def sample_arrivals(
    config: ScenarioConfig, profile: ArrivalProfile, rng: np.random.Generator
) -> list[UeRecord]:
    """Draw one activation time per UE and assign it to the DZ whose window holds it."""
    M = config.total_ues
    if M == 0:
        return []
    times = rng.beta(config.alpha, config.beta, size=M) * profile.horizon
    starts = profile.edges[1:]
    dz = np.searchsorted(starts, times, side="left") + 1
    dz = np.minimum(dz, config.dz_count)
    return [
        UeRecord(ue_id=k, arrival_time=float(t), arrival_dz=int(d), next_dz=int(d))
        for k, (t, d) in enumerate(zip(times, dz))
    ]


def run_dz(
    i: int,
    contenders: list[UeRecord],
    config: ScenarioConfig,
    rng: np.random.Generator,
) -> tuple[list[UeRecord], list[UeRecord]]:
    """Resolve contention in DZ(i).  Returns (successes, failures)."""
    if not contenders:
        return [], []
    bins = rng.integers(0, config.resources, size=len(contenders))
    alone = sole_occupants(bins, config.resources)
    tl = timeline(config)
    end = tl.dz_end(i)
    successes, failures = [], []
    for ue, ok in zip(contenders, alone):
        if ue.attempts >= config.max_transmissions:
            raise RuntimeError(f"UE {ue.ue_id} exceeded {config.max_transmissions} transmissions")
        ue.attempts += 1
        if ok:
            ue.outcome = Outcome.DISCOVERED
            ue.success_dz = i
            ue.next_dz = None
            ue.delay = end - ue.arrival_time + config.processing_delay
            successes.append(ue)
        else:
            failures.append(ue)
    return successes, failures


def apply_backoff(
    failures: list[UeRecord],
    i: int,
    config: ScenarioConfig,
    rng: np.random.Generator,
) -> tuple[dict[int, list[UeRecord]], list[UeRecord]]:
    """Drop exhausted UEs and schedule the rest ``W_BO`` zones ahead.

    Returns ``(schedule, dropped)`` where ``schedule`` maps target DZ to the
    UEs moved there; targets beyond DZ(K) stay pending.
    """
    schedule: dict[int, list[UeRecord]] = defaultdict(list)
    dropped = []
    retry = [ue for ue in failures if ue.attempts < config.max_transmissions]
    for ue in failures:
        if ue.attempts >= config.max_transmissions:
            ue.outcome = Outcome.DROPPED
            ue.next_dz = None
            dropped.append(ue)
    draws = rng.integers(1, config.backoff_window + 1, size=len(retry))
    for ue, w in zip(retry, draws):
        ue.backoff_draws.append(int(w))
        ue.next_dz = i + int(w)
        schedule[ue.next_dz].append(ue)
    return dict(schedule), dropped


@dataclass(frozen=True)
class McRunReport:
    config: ScenarioConfig
    seed: int
    per_dz_arrivals: np.ndarray
    per_dz_contenders: np.ndarray
    per_dz_success: np.ndarray
    per_dz_success_eq15: np.ndarray
    per_dz_dropped: np.ndarray
    per_dz_delay: np.ndarray  # mean delay of the UEs discovered in each DZ, NaN if none
    arrivals: int
    cumulative_success: int
    dropped: int
    pending: int
    empirical_avg_delay: float
    records: tuple[UeRecord, ...] = ()

    @property
    def per_dz_failed(self) -> np.ndarray:
        return self.per_dz_contenders - self.per_dz_success

    @property
    def cumulative_success_eq15(self) -> float:
        return float(self.per_dz_success_eq15.sum())

    @property
    def discovery_probability(self) -> float:
        M = self.config.total_ues
        return self.cumulative_success / M if M else 0.0


def run_mc(
    config: ScenarioConfig,
    seed: int,
    profile: ArrivalProfile | None = None,
    keep_records: bool = False,
) -> McRunReport:
    """Simulate one K-zone episode.  Deterministic in ``(config, seed)``."""
    validate(config)
    if profile is None:
        profile = arrival_profile(config)
    K = config.dz_count
    streams = run_streams(seed, K)
    ues = sample_arrivals(config, profile, streams.arrivals)

    buckets: dict[int, list[UeRecord]] = defaultdict(list)
    for ue in ues:
        buckets[ue.arrival_dz].append(ue)

    arrivals = np.bincount([ue.arrival_dz for ue in ues], minlength=K + 1)[1:]
    contenders = np.zeros(K, dtype=np.int64)
    success = np.zeros(K, dtype=np.int64)
    success_eq15 = np.zeros(K)
    dropped = np.zeros(K, dtype=np.int64)
    delay = np.full(K, np.nan)

    for i in range(1, K + 1):
        queue = sorted(buckets.pop(i, []), key=lambda u: u.ue_id)
        contenders[i - 1] = len(queue)
        wins, losses = run_dz(i, queue, config, streams.contention[i - 1])
        success[i - 1] = len(wins)
        success_eq15[i - 1] = math.fsum(1.0 - math.exp(-ue.attempts) for ue in wins)
        if wins:
            delay[i - 1] = math.fsum(ue.delay for ue in wins) / len(wins)
        schedule, gone = apply_backoff(losses, i, config, streams.backoff[i - 1])
        dropped[i - 1] = len(gone)
        for target, moved in schedule.items():
            buckets[target].extend(moved)

    n_success = int(success.sum())
    n_dropped = int(dropped.sum())
    pending = sum(1 for ue in ues if ue.outcome is Outcome.PENDING)
    delays = [ue.delay for ue in ues if ue.outcome is Outcome.DISCOVERED]
    return McRunReport(
        config=config,
        seed=seed,
        per_dz_arrivals=arrivals,
        per_dz_contenders=contenders,
        per_dz_success=success,
        per_dz_success_eq15=success_eq15,
        per_dz_dropped=dropped,
        per_dz_delay=delay,
        arrivals=len(ues),
        cumulative_success=n_success,
        dropped=n_dropped,
        pending=pending,
        empirical_avg_delay=math.fsum(delays) / len(delays) if delays else float("nan"),
        records=tuple(ues) if keep_records else (),
    )
