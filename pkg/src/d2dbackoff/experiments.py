"""Figure presets and parameter sweeps over the fluid and agent engines."""
from __future__ import annotations

import itertools
import logging
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .analytic import AnalyticReport, run_analytic
from .core import ScenarioConfig, SuccessMode, timeline, validate
from .delay import UndefinedDelayError, average_delay
from .montecarlo import McRunReport, run_mc
from .traffic import arrival_profile

log = logging.getLogger(__name__)


class Engine(str, Enum):
    ANALYTIC_LITERAL = "analytic-literal"
    ANALYTIC_COUPLED = "analytic-coupled"
    MC = "mc"


ALL_ENGINES = (Engine.ANALYTIC_LITERAL, Engine.ANALYTIC_COUPLED, Engine.MC)

AXIS_FIELDS = {
    "W": "backoff_window",
    "L_max": "max_transmissions",
    "M": "total_ues",
    "K": "dz_count",
}


@dataclass(frozen=True)
class SweepSpec:
    """A sweep: every point of ``values`` (one tuple per point, aligned with
    ``axis``) run on every engine."""

    base: ScenarioConfig
    axis: tuple[str, ...]
    values: tuple[tuple[int, ...], ...]
    engines: tuple[Engine, ...] = ALL_ENGINES
    mc_seeds: int = 20
    seed: int = 0
    name: str = "sweep"

    def __post_init__(self):
        object.__setattr__(self, "axis", tuple(self.axis))
        object.__setattr__(self, "values", tuple(tuple(v) if isinstance(v, (tuple, list)) else (v,) for v in self.values))
        object.__setattr__(self, "engines", tuple(Engine(e) for e in self.engines))
        unknown = [a for a in self.axis if a not in AXIS_FIELDS]
        if unknown:
            raise ValueError(f"unknown sweep axis {unknown}; choose from {sorted(AXIS_FIELDS)}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if any(len(v) != len(self.axis) for v in self.values):
            raise ValueError("every sweep point must give one value per axis")
        if not self.engines:
            raise ValueError("sweep needs at least one engine")
        if Engine.MC in self.engines and self.mc_seeds < 1:
            raise ValueError("mc_seeds must be ≥ 1 when the mc engine is selected")

    def point_config(self, point: tuple[int, ...]) -> ScenarioConfig:
        return self.base.with_(**{AXIS_FIELDS[a]: v for a, v in zip(self.axis, point)})


def preset(name: str) -> SweepSpec:
    """Sweep definitions behind each reproduced figure."""
    default = ScenarioConfig()
    if name == "fig2":
        return SweepSpec(default, ("W", "L_max"), ((1, 3), (1, 20), (3, 3), (3, 20)), mc_seeds=100, name=name)
    if name == "fig3":
        return SweepSpec(default.with_(backoff_window=3), ("L_max",), tuple((l,) for l in range(2, 8)),
                         mc_seeds=100, name=name)
    if name == "fig4":
        return SweepSpec(default.with_(max_transmissions=3), ("W",), tuple((w,) for w in range(1, 7)),
                         mc_seeds=100, name=name)
    if name == "fig5":
        return SweepSpec(default.with_(backoff_window=3, eq15_weighting=True), ("L_max",),
                         tuple((l,) for l in range(2, 8)), mc_seeds=100, name=name)
    if name == "fig6":
        base = default.with_(dz_count=200, backoff_window=3, max_transmissions=7)
        return SweepSpec(base, ("M",), tuple((450 * n,) for n in range(1, 7)), mc_seeds=20, name=name)
    raise KeyError(f"unknown preset {name!r}; choose from {PRESETS}")


PRESETS = ("fig2", "fig3", "fig4", "fig5", "fig6")
# presets whose natural output is one row per DZ rather than one row per sweep point
SERIES_PRESETS = ("fig2", "fig3", "fig4")


SERIES_COLUMNS = (
    "dz_index", "dz_start_s", "arrivals", "contenders", "success_raw", "success_eq15",
    "failed", "dropped", "cumulative_success", "discovery_probability", "avg_delay_s",
)


@dataclass(frozen=True)
class Series:
    """Per-DZ table; MC series hold means over seeds."""

    columns: dict[str, np.ndarray]

    def rows(self) -> list[dict]:
        n = len(self.columns["dz_index"])
        return [{c: self.columns[c][k] for c in SERIES_COLUMNS} for k in range(n)]

    def __len__(self) -> int:
        return len(self.columns["dz_index"])


def _series(config: ScenarioConfig, arrivals, contenders, raw, eq15, failed, dropped, delay) -> Series:
    tl = timeline(config)
    K = config.dz_count
    headline = eq15 if config.eq15_weighting else raw
    cum = np.cumsum(headline)
    M = config.total_ues
    cols = {
        "dz_index": np.arange(1, K + 1),
        "dz_start_s": np.array([tl.dz_start(i) for i in range(1, K + 1)]),
        "arrivals": np.asarray(arrivals),
        "contenders": np.asarray(contenders),
        "success_raw": np.asarray(raw),
        "success_eq15": np.asarray(eq15),
        "failed": np.asarray(failed),
        "dropped": np.asarray(dropped),
        "cumulative_success": cum,
        "discovery_probability": cum / M if M else np.zeros(K),
        "avg_delay_s": np.asarray(delay, dtype=float),
    }
    return Series(cols)


@dataclass(frozen=True)
class RunReport:
    """Metrics of one engine on one configuration."""

    engine: Engine
    config: ScenarioConfig
    cumulative_success_raw: float
    cumulative_success_eq15: float
    average_delay: float
    series: Series
    n_seeds: int = 0
    seeds: tuple[int, ...] = ()
    cumulative_success_stderr: float = float("nan")
    average_delay_stderr: float = float("nan")
    dropped: float = 0.0
    pending: float = 0.0

    @property
    def cumulative_success(self) -> float:
        return self.cumulative_success_eq15 if self.config.eq15_weighting else self.cumulative_success_raw

    @property
    def discovery_probability(self) -> float:
        M = self.config.total_ues
        return self.cumulative_success / M if M else 0.0

    def _ratio(self, denom: float) -> float:
        if denom <= 0 or math.isnan(self.average_delay):
            return float("nan")
        return self.average_delay / denom

    @property
    def tradeoff_raw(self) -> float:
        return self._ratio(self.cumulative_success_raw)

    @property
    def tradeoff_eq15(self) -> float:
        return self._ratio(self.cumulative_success_eq15)

    @property
    def tradeoff(self) -> float:
        return self._ratio(self.cumulative_success)


def analytic_run_report(report: AnalyticReport, engine: Engine | None = None) -> RunReport:
    config = report.config
    led = report.ledger
    try:
        d = average_delay(led, config, report.profile)
        avg, per_dz = d.average_delay, d.per_dz_delay
    except UndefinedDelayError:
        avg, per_dz = float("nan"), np.full(config.dz_count, np.nan)
    bal = report.balance
    series = _series(
        config,
        arrivals=led.m[:, 0],
        contenders=report.per_dz_total,
        raw=report.per_dz_success_raw,
        eq15=report.per_dz_success_eq15,
        failed=led.m_f.sum(axis=1),
        dropped=bal.exhausted_per_dz + bal.suppressed_per_dz,
        delay=per_dz,
    )
    if engine is None:
        engine = Engine.ANALYTIC_COUPLED if config.success_mode is SuccessMode.COUPLED else Engine.ANALYTIC_LITERAL
    return RunReport(
        engine=engine,
        config=config,
        cumulative_success_raw=report.cumulative_success_raw,
        cumulative_success_eq15=report.cumulative_success_eq15,
        average_delay=avg,
        series=series,
        dropped=bal.exhausted + bal.suppressed,
        pending=bal.pending,
    )


def _stderr(x: np.ndarray) -> float:
    x = x[~np.isnan(x)]
    if len(x) < 2:
        return float("nan")
    return float(np.std(x, ddof=1) / math.sqrt(len(x)))


def mc_run_report(runs: list[McRunReport]) -> RunReport:
    """Aggregate per-seed MC runs into means and standard errors."""
    config = runs[0].config
    stack = lambda attr: np.array([getattr(r, attr) for r in runs], dtype=float)  # noqa: E731
    succ = stack("cumulative_success")
    succ15 = np.array([r.cumulative_success_eq15 for r in runs])
    delays = stack("empirical_avg_delay")
    per_delay = np.array([r.per_dz_delay for r in runs])
    with warnings.catch_warnings():
        # DZs with no discoveries in any seed have no delay
        warnings.simplefilter("ignore", category=RuntimeWarning)
        per_dz_delay = np.nanmean(per_delay, axis=0)
        avg = float(np.nanmean(delays)) if np.any(~np.isnan(delays)) else float("nan")
    series = _series(
        config,
        arrivals=stack("per_dz_arrivals").mean(axis=0),
        contenders=stack("per_dz_contenders").mean(axis=0),
        raw=stack("per_dz_success").mean(axis=0),
        eq15=stack("per_dz_success_eq15").mean(axis=0),
        failed=np.array([r.per_dz_failed for r in runs], dtype=float).mean(axis=0),
        dropped=stack("per_dz_dropped").mean(axis=0),
        delay=per_dz_delay,
    )
    return RunReport(
        engine=Engine.MC,
        config=config,
        cumulative_success_raw=float(succ.mean()),
        cumulative_success_eq15=float(succ15.mean()),
        average_delay=avg,
        series=series,
        n_seeds=len(runs),
        seeds=tuple(r.seed for r in runs),
        cumulative_success_stderr=_stderr(succ),
        average_delay_stderr=_stderr(delays),
        dropped=float(stack("dropped").mean()),
        pending=float(stack("pending").mean()),
    )


def run_engine(config: ScenarioConfig, engine: Engine, seeds: tuple[int, ...] = (0,)) -> RunReport:
    validate(config)
    engine = Engine(engine)
    profile = arrival_profile(config)
    if engine is Engine.MC:
        return mc_run_report([run_mc(config, s, profile) for s in seeds])
    mode = SuccessMode.LITERAL if engine is Engine.ANALYTIC_LITERAL else SuccessMode.COUPLED
    cfg = config.with_(success_mode=mode)
    return analytic_run_report(run_analytic(cfg, profile), engine)


@dataclass(frozen=True)
class SweepCell:
    point: dict[str, int]
    engine: Engine
    report: RunReport | None = None
    error: str | None = None


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    cells: tuple[SweepCell, ...] = field(default_factory=tuple)

    def select(self, engine: Engine | str, **point) -> list[SweepCell]:
        engine = Engine(engine)
        return [
            c for c in self.cells
            if c.engine is engine and all(c.point.get(k) == v for k, v in point.items())
        ]

    def report(self, engine: Engine | str, **point) -> RunReport:
        hits = self.select(engine, **point)
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} cells match engine={engine} {point}")
        if hits[0].report is None:
            raise RuntimeError(hits[0].error)
        return hits[0].report


def _run_cell(args) -> SweepCell:
    spec, point, engine = args
    labels = dict(zip(spec.axis, point))
    try:
        config = spec.point_config(point)
        seeds = tuple(spec.seed + k for k in range(spec.mc_seeds))
        return SweepCell(labels, engine, run_engine(config, engine, seeds))
    except Exception as exc:  # one bad cell must not abort the sweep
        log.warning("sweep cell %s on %s failed: %s", labels, engine.value, exc)
        return SweepCell(labels, engine, None, f"{type(exc).__name__}: {exc}")


def run_sweep(spec: SweepSpec, workers: int = 1) -> SweepResult:
    """Run every (point, engine) cell; output order is sorted by point then engine."""
    engine_rank = {e: k for k, e in enumerate(ALL_ENGINES)}
    jobs = sorted(
        itertools.product(sorted(spec.values), spec.engines),
        key=lambda pe: (pe[0], engine_rank[pe[1]]),
    )
    args = [(spec, point, engine) for point, engine in jobs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(_run_cell, args))
    else:
        cells = [_run_cell(a) for a in args]
    return SweepResult(spec, tuple(cells))
