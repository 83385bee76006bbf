import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2dbackoff.analytic import run_analytic
from d2dbackoff.core import ScenarioConfig, TransmissionLedger
from d2dbackoff.delay import UndefinedDelayError, attempt_delay, average_delay, mean_backoff_time
from d2dbackoff.traffic import arrival_profile, mean_arrival_time
from d2dbackoff.core import timeline

DEFAULT = ScenarioConfig()


@pytest.mark.parametrize("W, expected", [(1, 10.03), (3, 20.06), (6, 35.105)])
def test_mean_backoff_defaults(W, expected):
    assert mean_backoff_time(W, 10.0, 0.03) == pytest.approx(expected, rel=1e-13)


@given(st.integers(1, 50), st.floats(0.01, 100), st.floats(0.001, 1))
def test_mean_backoff_closed_form(W, gap, zone):
    assert mean_backoff_time(W, gap, zone) == pytest.approx((W + 1) / 2 * (gap + zone), rel=1e-12)


def test_attempt_delay_terms():
    assert attempt_delay(1, DEFAULT, 4.0) == pytest.approx(4.005)
    assert attempt_delay(1, DEFAULT, 0.0) == pytest.approx(0.005)
    cfg = DEFAULT.with_(backoff_window=3, max_transmissions=3)
    assert attempt_delay(3, cfg, 4.0) == pytest.approx(4.0 + 2 * 20.06 + 0.005, rel=1e-13)
    with pytest.raises(IndexError):
        attempt_delay(4, cfg, 4.0)


def _ledger_with(m_s: np.ndarray) -> TransmissionLedger:
    return TransmissionLedger(m_s, m_s, np.zeros_like(m_s), m_s.shape[0])


def test_single_first_attempt_success():
    profile = arrival_profile(DEFAULT)
    m_s = np.zeros((20, 3))
    m_s[4, 0] = 1.0
    rep = average_delay(_ledger_with(m_s), DEFAULT, profile)
    t_ar = mean_arrival_time(profile, timeline(DEFAULT), 20)
    assert rep.average_delay == pytest.approx(t_ar + 0.005, rel=1e-13)
    assert rep.tradeoff == pytest.approx(rep.average_delay / 1.0)


def test_all_second_attempt():
    profile = arrival_profile(DEFAULT)
    m_s = np.zeros((20, 3))
    m_s[6:, 1] = 2.5
    rep = average_delay(_ledger_with(m_s), DEFAULT, profile)
    assert rep.average_delay == pytest.approx(rep.mean_arrival + rep.mean_backoff + 0.005, rel=1e-13)


def test_no_success_is_undefined():
    profile = arrival_profile(DEFAULT)
    with pytest.raises(UndefinedDelayError):
        average_delay(_ledger_with(np.zeros((20, 3))), DEFAULT, profile)


def test_attempt_delays_step_by_backoff():
    rep = run_analytic(DEFAULT.with_(max_transmissions=5))
    d = average_delay(rep.ledger, rep.config, rep.profile)
    assert np.allclose(np.diff(d.per_attempt_delay), d.mean_backoff)
    mat = d.attempt_delay_matrix(20)
    assert mat.shape == (5, 20) and np.all(mat == mat[:, :1])


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 6),
    st.integers(1, 8),
    st.integers(50, 3000),
    st.sampled_from(["literal", "coupled"]),
)
def test_delay_is_convex_combination(W, L, M, mode):
    cfg = DEFAULT.with_(backoff_window=W, max_transmissions=L, total_ues=M, success_mode=mode)
    rep = run_analytic(cfg)
    d = average_delay(rep.ledger, cfg, rep.profile)
    assert d.per_attempt_delay.min() - 1e-9 <= d.average_delay <= d.per_attempt_delay.max() + 1e-9
    assert d.average_delay >= cfg.processing_delay
    assert d.tradeoff > 0


def test_larger_window_lengthens_retries():
    profile = arrival_profile(DEFAULT)
    t_ar = mean_arrival_time(profile, timeline(DEFAULT), 20)
    for l in (2, 3):
        prev = -1
        for W in range(1, 7):
            cfg = DEFAULT.with_(backoff_window=W, max_transmissions=3)
            cur = attempt_delay(l, cfg, t_ar)
            assert cur > prev
            prev = cur


def test_tradeoff_argmin_scale_invariant():
    base = DEFAULT.with_(success_mode="coupled", backoff_window=3)
    pairs = []
    for L in range(2, 8):
        rep = run_analytic(base.with_(max_transmissions=L))
        d = average_delay(rep.ledger, rep.config, rep.profile)
        pairs.append((d.average_delay, rep.cumulative_success))
    ratios = [a / b for a, b in pairs]
    for c in (0.1, 7.0, 1e4):
        scaled = [(c * a) / (c * b) for a, b in pairs]
        assert int(np.argmin(scaled)) == int(np.argmin(ratios))
