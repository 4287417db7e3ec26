import json
import math
import warnings
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from bjtrace.core import RationalPolynomial, RegimeError, validate_params
from bjtrace.jack import alpha_coeff
from bjtrace.laplace import build_xy, ladder, moments
from bjtrace.normalization import fixed_trace_f, selberg
from bjtrace.tracedist import (ContinuationWarning, OutOfSupportError, assemble_pdf,
                               closed_form_n2, continue_ordinary, frobenius_piece, frobenius_state,
                               frobenius_vectors, gamma_exponent, guard_coefficients,
                               hypergeometric_pdf_01, pdf_cdf, pdf_eval, pdf_eval_grid, pdf_from_json,
                               pdf_moment, piece_degree, reflect, tridiag, xi_sign)

P3 = validate_params(3, 0, 0, 1)
q = st.fractions(min_value=0, max_value=3, max_denominator=4)


def test_tridiag_examples():
    s = tridiag(P3)
    assert s.u[3] == 0
    assert s.v[3] == 5
    for params in [P3, validate_params(4, F(1, 2), 2, 3)]:
        assert tridiag(params).w[params.N] == 0


@pytest.mark.parametrize("N", range(1, 6))
def test_similarity_transform(N):
    params = validate_params(N, F(2, 3), F(5, 4), F(3, 2))
    n = N + 1
    P = np.array([[math.comb(N - j, N - k) if k >= j else 0 for k in range(n)] for j in range(n)], dtype=object)
    Pinv = np.array([[(-1) ** (j + k) * P[j, k] for k in range(n)] for j in range(n)], dtype=object)
    assert (Pinv.dot(P) == np.eye(n, dtype=int)).all()
    lad = ladder(params)
    A = np.zeros((n, n), dtype=object)
    B = np.zeros((n, n), dtype=object)
    for j in range(n):
        A[j, j] = -(N - j)
        B[j, j] = lad.Btilde[j] - 1
        if j < N:
            A[j, j + 1] = N - j
            B[j + 1, j] = -lad.Dtilde[j + 1]
    assert (Pinv.dot(A).dot(P) == np.diag([-(N - j) for j in range(n)])).all()
    assert (Pinv.dot(B).dot(P) == tridiag(params).matrix()).all()
    X, _ = build_xy(params)
    assert (A == X).all()


def test_exponents_and_signs():
    assert [gamma_exponent(P3, p) for p in range(3)] == [5, 3, 3]
    assert [xi_sign(P3, p) for p in range(3)] == [1, -1, -1]
    with pytest.raises(RegimeError):
        xi_sign(validate_params(2, 0, F(1, 2), 1), 1)


@given(st.integers(1, 6), q, q, q, st.data())
def test_exponent_gap(N, a, b, beta, data):
    params = validate_params(N, a, b, beta)
    p = data.draw(st.integers(0, N - 1))
    assert tridiag(params).v[N - p] - gamma_exponent(params, p) == -p


def test_frobenius_examples():
    assert frobenius_piece(P3, 0).f == (1,)
    assert frobenius_piece(P3, 1).f == (1, F(-1, 4), F(1, 40))
    assert frobenius_piece(P3, 2).f == (1, F(1, 4), F(1, 40))


@pytest.mark.parametrize("params", [validate_params(3, 1, 2, 1), validate_params(4, F(1, 2), 1, 2)])
def test_first_correction(params):
    N = params.N
    s = tridiag(params)
    f = frobenius_piece(params, 0, order=3).f
    assert f[1] == -s.u[N] * s.w[N - 1] / (s.v[N] + 1)


def test_leading_vanishes_below_p():
    params = validate_params(4, 1, 2, 1)
    for p in range(4):
        g = frobenius_vectors(tridiag(params), p, p + 3)
        assert all(g[l][-1] == 0 for l in range(p))
        assert g[p][-1] != 0


@pytest.mark.parametrize("params", [validate_params(3, 1, 1, 1), validate_params(4, F(1, 2), 2, 2)])
def test_full_recurrence_residual(params):
    # (nu + l) Lambda_p g_l + (nu + l - 1) g_{l-1} = X g_{l-1}, every row
    s = tridiag(params)
    X = s.matrix()
    for p in range(params.N):
        lam = np.array(s.lambda_p(p), dtype=object)
        nu = s.v[params.N - p]
        g = frobenius_vectors(s, p, 12)
        for l in range(1, 12):
            prev = np.array(g[l - 1], dtype=object)
            lhs = (nu + l) * lam * np.array(g[l], dtype=object) + (nu + l - 1) * prev
            assert list(lhs) == list(X.dot(prev))


@pytest.mark.parametrize("params", [P3, validate_params(4, 2, 1, 3), validate_params(3, 1, 0, 2),
                                    validate_params(5, 0, 2, 1)])
def test_termination_guard(params):
    for p in range(params.N):
        assert guard_coefficients(params, p) == [0, 0, 0]
        assert len(frobenius_piece(params, p).f) <= piece_degree(params, p) + 1


def test_explicit_density_n3():
    pdf = assemble_pdf(P3)
    assert [pc.weight for pc in pdf.pieces] == [F(3, 8), -15, -15]
    assert [pc.gamma for pc in pdf.pieces] == [5, 3, 3]
    assert pdf_eval(pdf, F(1, 2)) == F(3, 256)
    assert pdf_moment(pdf, 0) == 1 and pdf_moment(pdf, 1) == F(3, 2)
    expected_mid = RationalPolynomial.monomial(5, F(3, 8)).shift(1) \
        - 15 * RationalPolynomial([0, 0, 0, 1]) * RationalPolynomial([1, F(-1, 4), F(1, 40)])
    assert pdf.piecewise.left[1] == expected_mid
    assert reflect(pdf) == pdf.piecewise
    assert pdf_cdf(pdf, 3) == 1


def test_reflection_swaps_a_and_b():
    left = assemble_pdf(validate_params(2, 1, 0, 2))
    right = assemble_pdf(validate_params(2, 0, 1, 2))
    assert reflect(left) == right.piecewise
    assert reflect(reflect(left)) == left.piecewise


def test_uniform_and_b0_weight():
    pdf = assemble_pdf(validate_params(1, 0, 0, 1))
    assert pdf.piecewise.left == (RationalPolynomial([1]),)
    for N, a, beta in [(3, 1, 1), (4, 2, 2)]:
        pdf = assemble_pdf(validate_params(N, a, 0, beta))
        assert pdf.pieces[0].weight == fixed_trace_f(N, a, beta) / selberg(N, a, 0, beta)


@pytest.mark.parametrize("N, a, b, beta", [(2, 1, 2, 1), (3, 2, 1, 2), (4, 0, 1, 1), (3, 3, 0, 4)])
def test_normalisation_and_moments(N, a, b, beta):
    params = validate_params(N, a, b, beta)
    pdf = assemble_pdf(params)
    assert pdf.piecewise.total_mass() == 1
    assert [pdf_moment(pdf, k) for k in range(5)] == moments(params, 4)
    assert pdf.piecewise.moment(2) == pdf_moment(pdf, 2)
    ts = np.linspace(0, N, 1000)
    assert np.all(pdf_eval_grid(pdf, ts) >= -1e-12)
    cdf = pdf.piecewise.cdf_float(ts)
    assert np.all(np.diff(cdf) >= -1e-12)


def test_series_matches_alpha_on_unit_interval():
    params = validate_params(3, F(1, 2), 2, 1)
    f = frobenius_piece(params, 0, order=10).f
    assert list(f) == [alpha_coeff(params, m) for m in range(11)]


def test_closed_form_n2_examples():
    params = validate_params(2, 0, 0, 1)
    assert closed_form_n2(params, F(1, 2)) == F(3, 2) * F(1, 4)
    val, _ = integrate.quad(lambda t: closed_form_n2(params, t), 0, 2, points=[1])
    assert val == pytest.approx(1, abs=1e-12)
    exact = assemble_pdf(validate_params(2, 1, 1, 2))
    for t in np.linspace(0, 2, 50):
        assert closed_form_n2(validate_params(2, 1, 1, 2), float(t)) == pytest.approx(
            pdf_eval(exact, float(t)), abs=1e-12)


def test_hypergeometric_b1():
    params = validate_params(3, 0, 1, 1)
    pdf = assemble_pdf(params)
    for t in [F(0), F(1, 7), F(1, 2), F(9, 10)]:
        assert hypergeometric_pdf_01(params, t, "b=1") == pdf_eval(pdf, t)
    lead = hypergeometric_pdf_01(params, F(1, 1000), "b=1") / F(1, 1000) ** 5
    assert lead == pytest.approx(float(fixed_trace_f(3, 0, 1) / selberg(3, 0, 1, 1)), rel=1e-2)
    with pytest.raises(ValueError):
        hypergeometric_pdf_01(validate_params(3, 0, 2, 1), F(1, 2), "b=1")


def test_hypergeometric_half_beta_series():
    params = validate_params(2, F(1, 3), F(-1, 2), 1)
    t = F(1, 5)
    approx = sum(alpha_coeff(params, p) * t ** p for p in range(40))
    rate = 1 + 2 * (params.a + 1)
    pref = fixed_trace_f(2, params.a, 1) / selberg(2, params.a, params.b, 1)
    val = hypergeometric_pdf_01(params, t, "b=-beta/2")
    assert val == pytest.approx(float(pref) * float(t) ** float(rate - 1) * float(approx), rel=1e-12)


def test_partial_mode_refuses_far_points():
    pdf = assemble_pdf(validate_params(3, F(-1, 2), 0, 1))
    assert pdf.partial and pdf.to_json()["partial"]
    assert pdf_eval(pdf, 0.5) > 0
    with pytest.raises(RegimeError):
        pdf_eval(pdf, 0.95)
    with pytest.raises(RegimeError):
        pdf_cdf(pdf, F(1, 2))
    with pytest.raises(OutOfSupportError):
        pdf_eval(pdf, 3.5)


def test_json_round_trip():
    pdf = assemble_pdf(validate_params(3, 1, 2, 1))
    doc = json.loads(json.dumps(pdf.to_json()))
    again = pdf_from_json(doc)
    assert again.piecewise == pdf.piecewise


def test_continuation_reproduces_polynomial_state():
    pdf = assemble_pdf(P3)
    for p, targets in [(0, [0.9, 1.5, 2.0, 2.5]), (1, [1.5, 2.0]), (2, [0.9, 1.0])]:
        state = frobenius_state(pdf, p, 0.5)
        poly = pdf.pieces[p].monomial_poly()
        for s in targets:
            with pytest.warns(ContinuationWarning):
                out = continue_ordinary(P3, p, state, 0.5, s)
            exact = float(poly(F(s))) / float(pdf.pieces[p].weight)
            assert abs(out[-1] - exact) <= 1e-10 * max(1.0, abs(exact))


def test_continuation_zero_step():
    state = frobenius_state(assemble_pdf(P3), 0, 0.5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = continue_ordinary(P3, 0, state, 0.5, 0.5)
    assert np.array_equal(out, state)


def test_continuation_nonpolynomial_density():
    pdf = assemble_pdf(validate_params(3, F(-1, 2), 0, 1))
    ts = np.linspace(0.01, 2.99, 150)
    vals = pdf_eval_grid(pdf, ts, continuation=True)
    assert np.all(vals >= 0)
    x, w = np.polynomial.legendre.leggauss(30)
    mass = sum(0.5 * np.dot(w, pdf_eval_grid(pdf, j + 0.5 * (x + 1), continuation=True)) for j in range(3))
    assert mass == pytest.approx(1, abs=1e-3)
