"""Beta-distributed activation traffic over the discovery horizon.

A UE population of size M activates at times drawn from a beta density
stretched over ``[0, T]``.  DZ(i) collects the UEs activated between the
start of DZ(i-1) and the start of DZ(i) (between 0 and the first start for
i = 1); those windows tile ``[0, T]`` exactly.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, betaln, xlog1py, xlogy

from .core import DzTimeline, ScenarioConfig, timeline
from .quadrature import integrate

log = logging.getLogger(__name__)

QUAD_ATOL = 1e-10
QUAD_MAX_INTERVALS = 500


def beta_pdf(t, alpha: float, beta: float, horizon: float):
    """Beta density on ``[0, horizon]`` in 1/seconds.

    ``t**(a-1) * (T-t)**(b-1) / (T**(a+b-1) * B(a, b))``, evaluated in log space
    so large shapes do not overflow.  Accepts scalars or arrays.
    """
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr > horizon) or np.any(np.isnan(t_arr)):
        raise ValueError(f"t outside the support [0, {horizon}]")
    x = t_arr / horizon
    with np.errstate(divide="ignore"):
        logp = xlogy(alpha - 1, x) + xlog1py(beta - 1, -x) - betaln(alpha, beta)
    out = np.exp(logp) / horizon
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ArrivalProfile:
    """Per-window activation mass and first moment for one scenario.

    ``window_mass[i-1]`` is the probability that a UE first contends in DZ(i);
    ``window_time[i-1]`` is the unnormalised absolute-time moment
    ``∫ t p(t) dt`` over the same window.
    """

    alpha: float
    beta: float
    horizon: float
    edges: np.ndarray
    window_mass: np.ndarray
    window_time: np.ndarray

    @property
    def dz_count(self) -> int:
        return len(self.window_mass)


def _check_index(i: int, tl: DzTimeline) -> None:
    if not 1 <= i <= tl.dz_count:
        raise IndexError(f"DZ index {i} outside 1..{tl.dz_count}")


def _quad(f, a: float, b: float) -> float:
    res = integrate(f, a, b, atol=QUAD_ATOL, max_intervals=QUAD_MAX_INTERVALS)
    if not res.converged:
        raise ArithmeticError(
            f"quadrature on [{a}, {b}] stopped at error {res.error:.3g} after {res.intervals} panels"
        )
    return res.value


def closed_form_mass(lower: float, upper: float, alpha: float, beta: float, horizon: float) -> float:
    """Window mass via the regularised incomplete beta function."""
    return float(betainc(alpha, beta, upper / horizon) - betainc(alpha, beta, lower / horizon))


def closed_form_time(lower: float, upper: float, alpha: float, beta: float, horizon: float) -> float:
    """``∫ t p(t) dt`` over a window, using ``t p_{a,b}(t) = T a/(a+b) p_{a+1,b}(t)``."""
    scale = horizon * alpha / (alpha + beta)
    return scale * closed_form_mass(lower, upper, alpha + 1, beta, horizon)


def window_mass_quad(lower: float, upper: float, alpha: float, beta: float, horizon: float) -> float:
    try:
        return _quad(lambda t: beta_pdf(t, alpha, beta, horizon), lower, upper)
    except ArithmeticError as exc:
        # singular endpoint densities (shape < 1) can exhaust the panel budget
        log.warning("%s; using the incomplete beta closed form", exc)
        return closed_form_mass(lower, upper, alpha, beta, horizon)


def window_time_quad(lower: float, upper: float, alpha: float, beta: float, horizon: float) -> float:
    try:
        return _quad(lambda t: t * beta_pdf(t, alpha, beta, horizon), lower, upper)
    except ArithmeticError as exc:
        log.warning("%s; using the incomplete beta closed form", exc)
        return closed_form_time(lower, upper, alpha, beta, horizon)


def arrival_profile(config: ScenarioConfig) -> ArrivalProfile:
    tl = timeline(config)
    edges = tl.window_edges()
    T = tl.horizon
    mass = np.array([
        window_mass_quad(edges[k], edges[k + 1], config.alpha, config.beta, T)
        for k in range(tl.dz_count)
    ])
    moment = np.array([
        window_time_quad(edges[k], edges[k + 1], config.alpha, config.beta, T)
        for k in range(tl.dz_count)
    ])
    for a in (edges, mass, moment):
        a.setflags(write=False)
    return ArrivalProfile(config.alpha, config.beta, T, edges, mass, moment)


def window_mass(i: int, profile: ArrivalProfile, tl: DzTimeline) -> float:
    """Probability that a UE's first contention is DZ(i)."""
    _check_index(i, tl)
    return float(profile.window_mass[i - 1])


def new_arrivals(i: int, config: ScenarioConfig, profile: ArrivalProfile) -> float:
    """Fluid count of first-time transmitters in DZ(i)."""
    return config.total_ues * window_mass(i, profile, timeline(config))


def window_time(i: int, profile: ArrivalProfile, tl: DzTimeline, corrected: bool = False) -> float:
    """Arrival-time moment of window i, in seconds.

    By default the literal unnormalised integral ``∫ t p(t) dt`` over the
    window.  With ``corrected=True`` returns the mean wait of a UE activated in
    the window until DZ(i) opens: ``dz_start(i) - E[t | window]`` (NaN for an
    empty window).
    """
    _check_index(i, tl)
    moment = float(profile.window_time[i - 1])
    if not corrected:
        return moment
    mass = float(profile.window_mass[i - 1])
    if mass <= 0:
        return float("nan")
    return tl.dz_start(i) - moment / mass


def mean_arrival_time(profile: ArrivalProfile, tl: DzTimeline, dz_count: int | None = None) -> float:
    """Average of the per-window moments over K windows."""
    k = tl.dz_count if dz_count is None else dz_count
    return float(np.sum(profile.window_time[:k]) / k)
