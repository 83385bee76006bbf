import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d2dbackoff.core import ScenarioConfig, timeline
from d2dbackoff.traffic import (
    arrival_profile,
    beta_pdf,
    closed_form_mass,
    closed_form_time,
    mean_arrival_time,
    new_arrivals,
    window_mass,
    window_mass_quad,
    window_time,
    window_time_quad,
)

DEFAULT = ScenarioConfig()
SHAPES = [1, 2, 3, 4, 10]


def test_pdf_uniform_case():
    t = np.linspace(0, 7.0, 11)
    assert np.allclose(beta_pdf(t, 1, 1, 7.0), 1 / 7.0)


def test_pdf_vanishes_at_origin():
    assert beta_pdf(0.0, 3, 4, 1.0) == 0.0


def test_pdf_hand_value():
    # B(3, 4) = 1/60
    assert beta_pdf(0.4, 3, 4, 1.0) == pytest.approx(60 * 0.16 * 0.216, rel=1e-13)


def test_pdf_domain():
    with pytest.raises(ValueError):
        beta_pdf(-0.1, 3, 4, 1.0)
    with pytest.raises(ValueError):
        beta_pdf(1.5, 3, 4, 1.0)


@given(
    st.floats(0.001, 0.999),
    st.floats(0.5, 12.0),
    st.floats(0.5, 12.0),
    st.floats(0.1, 1000.0),
    st.floats(0.01, 100.0),
)
def test_pdf_scaling(u, a, b, T, c):
    # interior points: near a singular endpoint rounding of t*c dominates
    t = u * T
    lhs = beta_pdf(c * t, a, b, c * T)
    rhs = beta_pdf(t, a, b, T) / c
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-300)


def _cdf_3_4(x):
    # integral of 60 x^2 (1-x)^3
    return 60 * (x**3 / 3 - 3 * x**4 / 4 + 3 * x**5 / 5 - x**6 / 6)


def _first_moment_3_4(x, T):
    # T * integral of 60 x^3 (1-x)^3
    return T * 60 * (x**4 / 4 - 3 * x**5 / 5 + x**6 / 2 - x**7 / 7)


def test_default_first_window_mass():
    profile = arrival_profile(DEFAULT)
    tl = timeline(DEFAULT)
    x = 10.0 / 200.57
    expected = _cdf_3_4(x)
    assert window_mass(1, profile, tl) == pytest.approx(expected, abs=1e-12)
    # quoted to three figures as "≈ 2.23e-3"
    assert window_mass(1, profile, tl) == pytest.approx(2.23e-3, rel=0.01)
    assert new_arrivals(1, DEFAULT, profile) == pytest.approx(450 * expected, rel=1e-10)


def test_default_first_window_time():
    profile = arrival_profile(DEFAULT)
    tl = timeline(DEFAULT)
    oracle = _first_moment_3_4(10.0 / 200.57, 200.57)
    assert window_time(1, profile, tl) == pytest.approx(oracle, abs=1e-10)
    # quoted loosely as "≈ 0.0167 s"
    assert window_time(1, profile, tl) == pytest.approx(0.0167, rel=0.02)


def test_window_time_matches_mpmath():
    tl = timeline(DEFAULT)
    T = tl.horizon
    mpmath.mp.dps = 30
    pdf = lambda t: 60 * t**2 * (T - t) ** 3 / T**6  # noqa: E731
    for i in (2, 7, 20):
        lo, hi = tl.arrival_window(i)
        oracle = float(mpmath.quad(lambda t: t * pdf(t), [lo, hi]))
        assert window_time_quad(lo, hi, 3, 4, T) == pytest.approx(oracle, abs=1e-10)


def test_masses_sum_to_one_and_arrivals_to_m():
    profile = arrival_profile(DEFAULT)
    assert profile.window_mass.sum() == pytest.approx(1.0, abs=1e-9)
    tl = timeline(DEFAULT)
    total = sum(new_arrivals(i, DEFAULT, profile) for i in range(1, 21))
    assert total == pytest.approx(450, rel=1e-6)
    assert all(new_arrivals(i, DEFAULT.with_(total_ues=0), profile) == 0 for i in range(1, 21))
    assert np.all(profile.window_mass >= 0) and np.all(profile.window_time >= 0)
    with pytest.raises(IndexError):
        window_mass(21, profile, tl)


def test_uniform_windows():
    cfg = DEFAULT.with_(alpha=1.0, beta=1.0)
    profile = arrival_profile(cfg)
    tl = timeline(cfg)
    T = tl.horizon
    for i in range(2, 21):
        lo, hi = tl.arrival_window(i)
        assert window_mass(i, profile, tl) == pytest.approx(10.03 / T, abs=1e-12)
        assert window_time(i, profile, tl) == pytest.approx((hi**2 - lo**2) / (2 * T), abs=1e-10)
    assert mean_arrival_time(profile, tl, 20) == pytest.approx(T / (2 * 20), rel=1e-9)


def test_window_times_sum_to_beta_mean():
    profile = arrival_profile(DEFAULT)
    tl = timeline(DEFAULT)
    total = sum(window_time(i, profile, tl) for i in range(1, 21))
    assert total == pytest.approx(200.57 * 3 / 7, rel=1e-6)
    assert mean_arrival_time(profile, tl, 20) == pytest.approx(200.57 * 3 / 7 / 20, rel=1e-6)
    assert mean_arrival_time(profile, tl, 20) == pytest.approx(4.298, abs=5e-4)


def test_single_window_mean_is_beta_mean():
    cfg = DEFAULT.with_(dz_count=1, backoff_window=1)
    profile = arrival_profile(cfg)
    tl = timeline(cfg)
    assert mean_arrival_time(profile, tl, 1) == pytest.approx(tl.horizon * 3 / 7, rel=1e-9)


@pytest.mark.parametrize("a", SHAPES)
@pytest.mark.parametrize("b", SHAPES)
def test_quadrature_agrees_with_incomplete_beta(a, b):
    cfg = DEFAULT.with_(alpha=float(a), beta=float(b))
    tl = timeline(cfg)
    T = tl.horizon
    for i in range(1, 21):
        lo, hi = tl.arrival_window(i)
        assert abs(window_mass_quad(lo, hi, a, b, T) - closed_form_mass(lo, hi, a, b, T)) < 1e-8
        assert abs(window_time_quad(lo, hi, a, b, T) - closed_form_time(lo, hi, a, b, T)) < 1e-8


def test_incomplete_beta_oracle_against_exact_rational():
    # integer shapes: the CDF is a polynomial, evaluate it in exact arithmetic
    x = Fraction(10, 1) / Fraction(20057, 100)
    exact = 60 * (x**3 / 3 - 3 * x**4 / 4 + 3 * x**5 / 5 - x**6 / 6)
    assert closed_form_mass(0.0, 10.0, 3, 4, 200.57) == pytest.approx(float(exact), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.floats(1.05, 12.0), st.floats(1.05, 12.0))
def test_window_mass_unimodal(a, b):
    profile = arrival_profile(DEFAULT.with_(alpha=a, beta=b))
    d = np.diff(profile.window_mass[1:])  # windows 2..K share one length
    signs = np.sign(d[np.abs(d) > 1e-15])
    # once decreasing, never increasing again
    if len(signs):
        first_down = np.argmax(signs < 0) if np.any(signs < 0) else len(signs)
        assert np.all(signs[first_down:] <= 0)


def test_corrected_window_time_is_mean_wait():
    cfg = DEFAULT.with_(alpha=1.0, beta=1.0)
    profile = arrival_profile(cfg)
    tl = timeline(cfg)
    # uniform arrivals: mean wait is half the window
    assert window_time(5, profile, tl, corrected=True) == pytest.approx(10.03 / 2, rel=1e-9)
    assert window_time(1, profile, tl, corrected=True) == pytest.approx(5.0, rel=1e-9)


def test_singular_shape_falls_back(caplog):
    cfg = DEFAULT.with_(alpha=0.3, beta=0.4)
    profile = arrival_profile(cfg)
    assert profile.window_mass.sum() == pytest.approx(1.0, abs=1e-9)
    assert math.isfinite(profile.window_time.sum())
