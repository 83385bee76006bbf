"""Random-backoff D2D discovery: fluid recursion, agent simulation and figure sweeps."""
from .analytic import AnalyticReport, expected_success, run_analytic, step_dz
from .core import ConfigError, DzTimeline, ScenarioConfig, SuccessMode, TransmissionLedger, timeline, validate
from .delay import DelayReport, UndefinedDelayError, average_delay, mean_backoff_time
from .experiments import Engine, SweepSpec, preset, run_engine, run_sweep
from .montecarlo import McRunReport, UeRecord, run_mc
from .traffic import ArrivalProfile, arrival_profile, beta_pdf

__all__ = [
    "AnalyticReport",
    "ArrivalProfile",
    "ConfigError",
    "DelayReport",
    "DzTimeline",
    "Engine",
    "McRunReport",
    "ScenarioConfig",
    "SuccessMode",
    "SweepSpec",
    "TransmissionLedger",
    "UeRecord",
    "UndefinedDelayError",
    "arrival_profile",
    "average_delay",
    "beta_pdf",
    "expected_success",
    "mean_backoff_time",
    "preset",
    "run_analytic",
    "run_engine",
    "run_mc",
    "run_sweep",
    "step_dz",
    "timeline",
    "validate",
]
