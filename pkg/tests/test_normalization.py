from fractions import Fraction as F

import numpy as np
import pytest
from scipy import integrate

from bjtrace.core import gamma_value
from bjtrace.normalization import beta_function, eta, fixed_trace_f, k_norm, laguerre_w, selberg


@pytest.mark.parametrize("args, expected", [
    ((1, 0, 0, 1), F(1)),
    ((2, 0, 0, 2), F(1, 6)),
    ((3, 0, 0, 1), F(1, 30)),
])
def test_selberg_values(args, expected):
    assert selberg(*args) == expected


def test_selberg_brute_force_double_integral():
    # symmetric integrand: twice the integral over y < x
    val, _ = integrate.dblquad(lambda y, x: x ** 0.5 * (1 - x) * y ** 0.5 * (1 - y) * (x - y),
                               0, 1, 0, lambda x: x, epsabs=1e-13)
    assert float(selberg(2, F(1, 2), 1, 1)) == pytest.approx(2 * val, rel=1e-8)


@pytest.mark.parametrize("a", [0, F(1, 2), 3])
def test_selberg_one_is_beta(a):
    assert selberg(1, a, 2, 5) == beta_function(a, 2)


def test_laguerre_w():
    assert laguerre_w(F(3, 2), 1, 1) == gamma_value(F(5, 2))
    assert laguerre_w(0, 1, 2) == 1
    assert laguerre_w(0, 1, 3) == F(3, 2)
    assert laguerre_w(0, 1, 0) == 1


def test_fixed_trace_f():
    assert fixed_trace_f(1, F(7, 3), 2) == 1
    assert fixed_trace_f(2, 0, 1) == F(1, 2)
    assert fixed_trace_f(3, 0, 1) == F(1, 80)


def test_eta_and_k():
    assert eta(3, 0, 0, 0, 1) == 6
    assert eta(3, 0, 0, 1, 1) == 4
    assert k_norm(3, 0, 0, 1, 1) == F(1, 6)
    for N, a, b, beta in [(3, 1, 2, 1), (4, F(1, 2), 0, 2)]:
        assert eta(N, a, b, 0, beta) == (a + 1) * N + F(beta, 2) * N * (N - 1)
        assert k_norm(N, a, b, 0, beta) == fixed_trace_f(N, a, beta)
        assert k_norm(N, a, b, N, beta) == k_norm(N, b, a, 0, beta) == fixed_trace_f(N, b, beta)


def test_float_path():
    assert isinstance(selberg(3, 0.0, 0.0, 1.0), float)
    assert selberg(3, 0.0, 0.0, 1.0) == pytest.approx(1 / 30, rel=1e-13)
    with pytest.raises(ValueError):
        k_norm(3, 0, 0, 4, 1)


def test_weight_integral_of_laguerre():
    # W_{0,1,2} = int int e^{-x-y} |x - y|
    val, _ = integrate.dblquad(lambda y, x: np.exp(-x - y) * (x - y), 0, np.inf, 0, lambda x: x)
    assert 2 * val == pytest.approx(1.0, rel=1e-8)
