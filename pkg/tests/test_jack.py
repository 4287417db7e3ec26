import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from bjtrace.core import EnsembleParams, validate_params
from bjtrace.jack import (NonConvergentError, Partition, alpha_coeff, gauss_2f1, gen_pochhammer,
                          jack_unity, moment_dual, moment_oracle, partitions_of, pochhammer)

small_q = st.fractions(min_value=F(1, 4), max_value=6, max_denominator=8)


def _count_partitions(k, largest):
    if k == 0:
        return 1
    return sum(_count_partitions(k - f, f) for f in range(1, min(k, largest) + 1))


def test_partition_examples():
    assert partitions_of(2, 3) == [Partition((2,)), Partition((1, 1))]
    assert partitions_of(1, 5) == [Partition((1,))]
    assert len(partitions_of(6, 6)) == 11
    assert partitions_of(0) == [Partition(())]


@pytest.mark.parametrize("k", range(1, 13))
def test_partition_counts(k):
    parts = partitions_of(k)
    assert len(parts) == _count_partitions(k, k) == len(set(parts))
    assert all(p.weight == k for p in parts)
    assert all(p.length <= 3 for p in partitions_of(k, 3))


@given(st.lists(st.integers(1, 6), max_size=6))
def test_conjugate_is_involution(xs):
    kappa = Partition(tuple(sorted(xs, reverse=True)))
    assert kappa.conjugate().conjugate() == kappa
    assert kappa.conjugate().weight == kappa.weight
    for i, j in kappa.boxes():
        assert kappa.leg(i, j) == kappa.conjugate().arm(j, i)


def test_gen_pochhammer_examples():
    u, alpha = F(7, 3), F(2, 5)
    assert gen_pochhammer(u, Partition((1,)), alpha) == u
    assert gen_pochhammer(u, Partition((1, 1)), alpha) == u * (u - 1 / alpha)
    assert gen_pochhammer(u, Partition((2,)), alpha) == u * (u + 1)


@given(st.lists(st.integers(1, 4), min_size=1, max_size=4), small_q, small_q)
def test_pochhammer_conjugation(xs, u, alpha):
    kappa = Partition(tuple(sorted(xs, reverse=True)))
    lhs = gen_pochhammer(u, kappa, alpha)
    rhs = (-1 / alpha) ** kappa.weight * gen_pochhammer(-alpha * u, kappa.conjugate(), 1 / alpha)
    assert lhs == rhs


@pytest.mark.parametrize("beta", [F(1, 2), 1, 2, 4])
def test_jack_unity_examples(beta):
    n = F(5)
    alpha = F(2) / beta
    half = F(beta, 2)
    assert jack_unity(Partition((1,)), alpha, n) == n
    assert jack_unity(Partition((2,)), alpha, n) == n * (1 + half * n) / (1 + half)
    assert jack_unity(Partition((1, 1)), alpha, n) == n * (n - 1) / (1 + half)


@settings(deadline=None)
@given(st.integers(1, 7), small_q, st.integers(1, 6))
def test_jack_unity_sum_rule(k, alpha, n):
    # sum over |kappa| = k of C_kappa(1^n) equals (1 + ... + 1)^k
    assert sum(jack_unity(kp, alpha, n) for kp in partitions_of(k)) == n ** k


def test_moment_oracle_examples():
    assert moment_oracle(validate_params(3, 0, 0, 1), 2) == F(33, 14)
    for k in range(6):
        assert moment_oracle(validate_params(1, 0, 0, 3), k) == F(1, k + 1)


@given(st.integers(1, 6), small_q, small_q, small_q)
def test_first_moment_closed_form(N, a, b, beta):
    params = EnsembleParams(N, a, b, beta)
    u1 = beta / 2 * (N - 1) + a + 1
    u2 = beta * (N - 1) + a + b + 2
    assert moment_oracle(params, 1) == N * u1 / u2 == moment_dual(params, 1)


def test_moment_dual_examples():
    p = validate_params(3, 0, 0, 1)
    assert moment_dual(p, 0) == 1
    assert moment_dual(p, 2) == F(33, 14)


def test_alpha_coeff_examples():
    assert alpha_coeff(validate_params(3, 2, 1, 1), 0) == 1
    assert alpha_coeff(validate_params(2, 0, 1, 2), 1) == -1
    assert alpha_coeff(validate_params(2, 0, 1, 2), 1, method="sum") == -1
    for p in range(4, 8):
        assert alpha_coeff(validate_params(3, F(1, 2), 1, 1), p) == 0


@pytest.mark.parametrize("N, a, beta", [(2, 0, 1), (3, F(1, 2), 2), (4, 1, 4), (3, 2, F(1, 2))])
def test_alpha_fast_path_b1(N, a, beta):
    params = validate_params(N, a, 1, beta)
    for p in range(8):
        assert alpha_coeff(params, p) == alpha_coeff(params, p, method="sum")


@pytest.mark.parametrize("a", [0, F(1, 2), 2])
def test_alpha_half_beta_case(a):
    # N = 2, beta = 1, b = -1/2: (1)_p (a + 3/2)_p / (p! (2a + 3)_p)
    params = validate_params(2, a, F(-1, 2), 1)
    for p in range(8):
        expected = pochhammer(1, p) * pochhammer(a + F(3, 2), p) / (math.factorial(p) * pochhammer(2 * a + 3, p))
        assert alpha_coeff(params, p) == expected
        assert alpha_coeff(params, p, method="sum") == expected


def test_gauss_2f1_examples():
    assert gauss_2f1(2, 3, 4, 0) == 1
    assert gauss_2f1(-1, 2, 3, F(1, 2)) == F(2, 3)
    assert gauss_2f1(1, 1, 2, F(1, 2)) == pytest.approx(2 * math.log(2), rel=1e-15)
    with pytest.raises(NonConvergentError):
        gauss_2f1(1, 1, 2, F(3, 2))


@given(st.floats(-1, 3), st.floats(-1, 3), st.floats(0.5, 4), st.floats(-0.9, 0.9))
def test_gauss_2f1_against_scipy(A, B, C, x):
    assert gauss_2f1(A, B, C, x) == pytest.approx(special.hyp2f1(A, B, C, x), rel=1e-10, abs=1e-12)
