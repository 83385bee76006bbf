import math

import numpy as np
import pytest

from d2dbackoff.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, gk15, integrate


def test_rule_weights_sum_to_interval_length():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert np.allclose(NODES, -NODES[::-1])


@pytest.mark.parametrize("degree", range(0, 23))
def test_kronrod_exact_through_degree_22(degree):
    value, _ = gk15(lambda x: x**degree, 0.0, 1.0)
    assert value == pytest.approx(1.0 / (degree + 1), rel=1e-13)


def test_gauss_part_exact_through_degree_13():
    _, err = gk15(lambda x: 3 * x**13 - x**4 + 2, -1.0, 2.0)
    assert err < 1e-12


def test_adaptive_handles_endpoint_sqrt():
    res = integrate(np.sqrt, 0.0, 1.0, atol=1e-10)
    assert res.converged
    assert res.value == pytest.approx(2.0 / 3.0, abs=1e-10)


def test_adaptive_oscillatory():
    res = integrate(lambda x: np.sin(50 * x), 0.0, math.pi, atol=1e-10)
    assert res.value == pytest.approx((1 - math.cos(50 * math.pi)) / 50, abs=1e-10)


def test_reversed_and_empty_interval():
    assert integrate(np.exp, 1.0, 0.0).value == pytest.approx(-(math.e - 1), abs=1e-12)
    assert integrate(np.exp, 2.0, 2.0).value == 0.0


def test_cap_reports_non_convergence():
    res = integrate(lambda x: 1 / np.sqrt(x), 0.0, 1.0, atol=1e-14, max_intervals=5)
    assert not res.converged
    assert res.intervals <= 5
