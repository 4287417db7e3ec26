"""The density of the trace on ``[0, N]``.

For ``b`` and ``beta`` nonnegative integers the density is a sum of pieces

    P(t) = sum_p weight_p * chi(t >= p) * (t - p)**gamma_p * F_p(t - p),

one per integer ``p = 0..N-1``.  Each ``s**gamma_p F_p(s)`` is the last
component of a Frobenius solution of the tridiagonal system
``(Lambda_p + s) G'(s) = X G(s)`` about ``s = 0``; the weights are closed-form
Gamma products.  When ``a`` is also a nonnegative integer every ``F_p`` is a
polynomial and everything below is exact.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from .core import (EnsembleParams, GammaProduct, RationalPolynomial, RegimeError,
                   as_scalar, exact_or_float, format_rational, is_integer, is_nonneg_integer,
                   to_rational)
from .jack import gauss_2f1
from .normalization import fixed_trace_f, k_norm, selberg

DEFAULT_SERIES_ORDER = 60
GUARD = 3
SERIES_TRUST = Fraction(9, 10)


class OutOfSupportError(ValueError):
    pass


class ZeroLeadingCoefficientError(ArithmeticError):
    pass


class StepRejectedError(ArithmeticError):
    pass


class ContinuationWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# the tridiagonal system


@dataclass(frozen=True)
class TridiagonalSystem:
    N: int
    u: tuple
    v: tuple
    w: tuple

    def lambda_p(self, p: int) -> tuple:
        """Diagonal of ``Lambda + p I``; its only zero sits at index ``N - p``."""
        return tuple(p - self.N + j for j in range(self.N + 1))

    def matrix(self) -> np.ndarray:
        n = self.N + 1
        X = np.zeros((n, n), dtype=object)
        for j in range(n):
            X[j, j] = self.v[j]
            if j > 0:
                X[j, j - 1] = self.u[j]
            if j < self.N:
                X[j, j + 1] = self.w[j]
        return X


def tridiag(params: EnsembleParams) -> TridiagonalSystem:
    return _tridiag(params.N, as_scalar(params.a), as_scalar(params.b), as_scalar(params.beta))


def _tridiag(N, a, b, beta) -> TridiagonalSystem:
    half = beta / 2
    lin = a + b + 1 + half * (2 * N - 1)
    q = half * N + b
    u = tuple(-j * q + half * j * j for j in range(N + 1))
    v = tuple(lin * j - half * (N - j) * (2 * j + 1) + q * (N - 2 * j) - 1 for j in range(N + 1))
    w = tuple(lin * (j - N) + half * (N - j) * (N - j - 1) + q * (N - j) for j in range(N + 1))
    return TridiagonalSystem(N, u, v, w)


def gamma_exponent(params: EnsembleParams, p: int):
    """Power of ``(t - p)`` with which piece ``p`` starts."""
    N = params.N
    a, b, beta = as_scalar(params.a), as_scalar(params.b), as_scalar(params.beta)
    q = N - p
    return (N - 1) + b * p + beta * p * (p - 1) / 2 + a * q + beta * q * (q - 1) / 2


def xi_sign(params: EnsembleParams, p: int) -> int:
    b, beta = params.b, params.beta
    if not (is_nonneg_integer(b) and is_nonneg_integer(beta)):
        raise RegimeError("the sign of piece p needs b and beta nonnegative integers")
    e = p * (int(b) + 1) + int(beta) * p * (p - 1) // 2
    return -1 if e % 2 else 1


def piece_degree(params: EnsembleParams, p: int) -> int:
    """Degree of the polynomial ``F_p`` when ``a``, ``b``, ``beta`` are integers >= 0."""
    N = params.N
    return int(params.a * p + params.b * (N - p) + p * (N - p) * params.beta)


# ---------------------------------------------------------------------------
# Frobenius pieces


@dataclass(frozen=True)
class FrobeniusPiece:
    """Frobenius solution about ``s = 0`` of the system shifted to ``t = p``.

    ``g[l]`` are the raw coefficient vectors; ``f`` the coefficients of
    ``F_p`` normalised to ``f[0] = 1``.
    """

    p: int
    v: object
    gamma: object
    g: tuple
    f: tuple
    polynomial: bool

    @property
    def lead(self):
        return self.g[self.p][-1]

    def poly(self) -> RationalPolynomial:
        return RationalPolynomial(self.f)


class _Eps:
    """Truncated power series in a small shift of ``b`` (exact coefficients).

    Used to take the ``b -> b0`` limit of the normalised Frobenius coefficients
    when the leading coefficient ``(g_p)_N`` vanishes at ``b0`` (e.g. ``b = 0``).
    """

    __slots__ = ("c",)
    R = 4

    def __init__(self, c):
        self.c = tuple(c)

    @classmethod
    def lift(cls, x):
        return x if isinstance(x, _Eps) else cls((x,) + (0,) * cls.R)

    def __add__(self, o):
        o = _Eps.lift(o)
        return _Eps(x + y for x, y in zip(self.c, o.c))

    __radd__ = __add__

    def __neg__(self):
        return _Eps(-x for x in self.c)

    def __sub__(self, o):
        return self + (-_Eps.lift(o))

    def __rsub__(self, o):
        return _Eps.lift(o) - self

    def __mul__(self, o):
        if not isinstance(o, _Eps):
            return _Eps(x * o for x in self.c)
        n = len(self.c)
        out = [0] * n
        for i, x in enumerate(self.c):
            if x:
                for j in range(n - i):
                    out[i + j] += x * o.c[j]
        return _Eps(out)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if not isinstance(o, _Eps):
            return _Eps(x / o for x in self.c)
        if o.c[0] == 0:
            raise ZeroDivisionError("series division by a vanishing constant term")
        n = len(self.c)
        q = [0] * n
        for k in range(n):
            acc = self.c[k] - sum(q[i] * o.c[k - i] for i in range(k))
            q[k] = acc / o.c[0]
        return _Eps(q)

    def __rtruediv__(self, o):
        return _Eps.lift(o) / self

    def __eq__(self, o):
        return self.c == _Eps.lift(o).c

    __hash__ = None

    def valuation(self):
        for i, x in enumerate(self.c):
            if x != 0:
                return i
        return None


def _const(x):
    return x.c[0] if isinstance(x, _Eps) else x


def frobenius_vectors(system: TridiagonalSystem, p: int, n_terms: int, check: bool = True) -> list:
    """Coefficient vectors ``g_0 .. g_{n_terms-1}`` of the solution starting at ``e_{N-p}``."""
    N = system.N
    k = N - p
    lam = system.lambda_p(p)
    u, v, w = system.u, system.v, system.w
    nu = v[k]
    zero = nu * 0
    g0 = [zero] * (N + 1)
    g0[k] = zero + 1
    out = [g0]
    for l in range(1, n_terms):
        prev = out[-1]
        scale = nu + l
        if _const(scale) <= 0:
            raise ZeroDivisionError(f"Frobenius exponent + {l} is not positive ({scale})")
        shift = nu + l - 1
        if check:
            # the zero row of Lambda_p forces this identity on the previous vector
            lhs = (l - 1) * prev[k]
            rhs = u[k] * (prev[k - 1] if k > 0 else 0) + w[k] * (prev[k + 1] if k < N else 0)
            assert lhs == rhs, f"consistency row broken at l={l}"
        g = [zero] * (N + 1)
        for j in range(N + 1):
            if j == k:
                continue
            acc = (v[j] - shift) * prev[j]
            if j > 0:
                acc += u[j] * prev[j - 1]
            if j < N:
                acc += w[j] * prev[j + 1]
            g[j] = acc / (scale * lam[j])
        g[k] = (u[k] * (g[k - 1] if k > 0 else 0) + w[k] * (g[k + 1] if k < N else 0)) / l
        out.append(g)
    return out


def frobenius_piece(params: EnsembleParams, p: int, order: Optional[int] = None,
                    check: bool = True) -> FrobeniusPiece:
    """Piece ``p``: exponent, raw vectors and normalised coefficients of ``F_p``.

    ``order`` is the highest power of ``s`` kept in ``F_p``.  By default it is
    the polynomial degree plus a few guard terms in polynomial mode and
    ``DEFAULT_SERIES_ORDER`` otherwise.
    """
    if not params.assembly_ok:
        raise RegimeError("Frobenius pieces need b and beta nonnegative integers")
    N = params.N
    if not 0 <= p <= N - 1:
        raise ValueError(f"p must lie in [0, {N - 1}]")
    poly = params.polynomial_ok
    if order is None:
        order = piece_degree(params, p) + GUARD if poly else DEFAULT_SERIES_ORDER
    system = tridiag(params)
    g = frobenius_vectors(system, p, p + order + 1, check=check)
    lead = g[p][N]
    if lead != 0:
        f = [g[p + m][N] / lead for m in range(order + 1)]
    else:
        f = _limit_coefficients(params, p, order, check)
    if poly:
        deg = piece_degree(params, p)
        f = f[:deg + 1] if len(f) > deg else f
    return FrobeniusPiece(p, system.v[N - p], gamma_exponent(params, p), tuple(g), tuple(f), poly)


def guard_coefficients(params: EnsembleParams, p: int, guard: int = GUARD) -> list:
    """Normalised coefficients ``f_{deg+1} .. f_{deg+guard}`` of piece ``p``.

    In polynomial mode these must all vanish (the series terminates at ``deg``).
    """
    if not params.polynomial_ok:
        raise RegimeError("termination is only defined in polynomial mode")
    N = params.N
    deg = piece_degree(params, p)
    order = deg + guard
    g = frobenius_vectors(tridiag(params), p, p + order + 1)
    lead = g[p][N]
    if lead != 0:
        f = [g[p + m][N] / lead for m in range(order + 1)]
    else:
        f = _limit_coefficients(params, p, order, True)
    return f[deg + 1:]


def _limit_coefficients(params: EnsembleParams, p: int, order: int, check: bool) -> list:
    """Normalised coefficients as the limit ``b' -> b`` when ``(g_p)_N = 0`` at ``b``."""
    N = params.N
    b = _Eps((as_scalar(params.b), 1) + (0,) * (_Eps.R - 1))
    system = _tridiag(N, as_scalar(params.a), b, as_scalar(params.beta))
    g = frobenius_vectors(system, p, p + order + 1, check=check)
    lead = g[p][N]
    r = lead.valuation()
    if r is None:
        raise ZeroLeadingCoefficientError(
            f"(g_p)_N vanishes to order > {_Eps.R} in b for p={p}")
    out = []
    for m in range(order + 1):
        num = g[p + m][N]
        low = num.valuation()
        if low is not None and low < r:
            raise ZeroLeadingCoefficientError(f"coefficient {m} of piece {p} diverges as b -> {params.b}")
        out.append(num.c[r] / lead.c[r])
    return out


# ---------------------------------------------------------------------------
# piecewise polynomials (exact, polynomial mode)


@dataclass(frozen=True)
class PiecewisePolynomial:
    """A function on ``[0, N]`` given by one exact polynomial per ``[j, j+1]``.

    ``left[j]`` is the polynomial in ``x = t - j``.  Float evaluation uses the
    expansion about the nearer endpoint of each interval to limit cancellation.
    """

    N: int
    left: tuple

    @cached_property
    def right(self) -> tuple:
        # right[j](y) = left[j](1 - y)
        return tuple(q.shift(1).compose_negate() for q in self.left)

    @cached_property
    def _masses(self) -> tuple:
        acc = [Fraction(0)]
        for q in self.left:
            acc.append(acc[-1] + q.definite_integral(0, 1))
        return tuple(acc)

    @cached_property
    def _float_tables(self):
        L = [np.array([float(c) for c in q.coeffs] or [0.0]) for q in self.left]
        R = [np.array([float(c) for c in q.coeffs] or [0.0]) for q in self.right]
        AL = [np.array([float(c) for c in q.antiderivative().coeffs] or [0.0]) for q in self.left]
        AR = [np.array([float(c) for c in q.antiderivative().coeffs] or [0.0]) for q in self.right]
        return L, R, AL, AR, np.array([float(m) for m in self._masses])

    def __eq__(self, other):
        if isinstance(other, PiecewisePolynomial):
            return self.N == other.N and self.left == other.left
        return NotImplemented

    def __hash__(self):
        return hash((self.N, self.left))

    def _locate(self, t):
        if t < 0 or t > self.N:
            raise OutOfSupportError(f"t={t} outside [0, {self.N}]")
        j = min(int(math.floor(t)), self.N - 1)
        return j, t - j

    def evaluate(self, t):
        if isinstance(t, (float, np.ndarray, list)):
            return self.evaluate_float(t)
        t = to_rational(t)
        j, x = self._locate(t)
        return self.left[j].evaluate(x)

    def cdf(self, t):
        if isinstance(t, (float, np.ndarray, list)):
            return self.cdf_float(t)
        t = to_rational(t)
        j, x = self._locate(t)
        return self._masses[j] + self.left[j].antiderivative().evaluate(x)

    def total_mass(self) -> Fraction:
        return self._masses[-1]

    def moment(self, k: int) -> Fraction:
        mono = RationalPolynomial.monomial(k)
        return sum((q * mono.shift(j)).definite_integral(0, 1) for j, q in enumerate(self.left))

    def _float_prep(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any((t < 0) | (t > self.N)):
            raise OutOfSupportError(f"values outside [0, {self.N}]")
        j = np.minimum(np.floor(t).astype(np.int64), self.N - 1)
        return t, j, t - j

    def evaluate_float(self, t) -> np.ndarray:
        L, R, _, _, _ = self._float_tables
        t, j, x = self._float_prep(t)
        out = np.empty_like(t)
        for jj in range(self.N):
            sel = j == jj
            if not sel.any():
                continue
            xs = x[sel]
            near_left = xs <= 0.5
            vals = np.empty_like(xs)
            vals[near_left] = _horner(L[jj], xs[near_left])
            vals[~near_left] = _horner(R[jj], 1.0 - xs[~near_left])
            out[sel] = vals
        return out

    def cdf_float(self, t) -> np.ndarray:
        _, _, AL, AR, M = self._float_tables
        t, j, x = self._float_prep(t)
        out = np.empty_like(t)
        for jj in range(self.N):
            sel = j == jj
            if not sel.any():
                continue
            xs = x[sel]
            near_left = xs <= 0.5
            vals = np.empty_like(xs)
            vals[near_left] = M[jj] + _horner(AL[jj], xs[near_left])
            vals[~near_left] = M[jj + 1] - _horner(AR[jj], 1.0 - xs[~near_left])
            out[sel] = vals
        return out

    def reflected(self) -> "PiecewisePolynomial":
        """The function ``t -> self(N - t)``."""
        return PiecewisePolynomial(self.N, tuple(reversed(self.right)))


def _horner(coeffs: np.ndarray, x: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(x)
    for c in coeffs[::-1]:
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# the assembled density


@dataclass(frozen=True)
class Piece:
    p: int
    weight: object  # Fraction, or float when Gamma factors do not cancel
    gamma: object
    f: tuple
    polynomial: bool

    def monomial_poly(self) -> RationalPolynomial:
        """``weight * s**gamma * F_p(s)`` as a polynomial in ``s`` (integer gamma)."""
        g = int(self.gamma)
        return RationalPolynomial([0] * g + [self.weight * c for c in self.f])


@dataclass(frozen=True)
class PiecewisePDF:
    params: EnsembleParams
    pieces: tuple
    frobenius: tuple = field(default=(), compare=False, repr=False)

    @property
    def polynomial(self) -> bool:
        return all(pc.polynomial for pc in self.pieces)

    @property
    def partial(self) -> bool:
        """True when pieces are truncated series trusted only for ``t - p < 0.9``."""
        return not self.polynomial

    @cached_property
    def piecewise(self) -> PiecewisePolynomial:
        if not self.polynomial:
            raise RegimeError("exact piecewise polynomial needs a nonnegative integer a")
        N = self.params.N
        polys = [pc.monomial_poly() for pc in self.pieces]
        left = []
        for j in range(N):
            total = RationalPolynomial()
            for pc, q in zip(self.pieces, polys):
                if pc.p <= j:
                    total = total + q.shift(j - pc.p)
            left.append(total)
        return PiecewisePolynomial(N, tuple(left))

    def to_json(self) -> dict:
        out = self.params.as_json()
        pieces = []
        for pc in self.pieces:
            pieces.append({
                "p": pc.p,
                "gamma": _fmt(pc.gamma),
                "weight": _fmt(pc.weight),
                "coeffs": [_fmt(c) for c in pc.f],
            })
        out["pieces"] = pieces
        if self.partial:
            out["partial"] = True
        return out


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else format_rational(x)


def piece_weight(params: EnsembleParams, p: int):
    """``xi_p * C(N, p) * K_N(a, b, p, beta) / S_N(a, b, beta)``."""
    N = params.N
    w = k_norm(N, params.a, params.b, p, params.beta) / selberg(N, params.a, params.b, params.beta)
    w = w * (xi_sign(params, p) * math.comb(N, p))
    return exact_or_float(w)


def assemble_pdf(params: EnsembleParams, order: Optional[int] = None) -> PiecewisePDF:
    if not params.assembly_ok:
        raise RegimeError("the piecewise density needs b and beta nonnegative integers")
    pieces, frob = [], []
    for p in range(params.N):
        fp = frobenius_piece(params, p, order)
        frob.append(fp)
        pieces.append(Piece(p, piece_weight(params, p), fp.gamma, fp.f, fp.polynomial))
    return PiecewisePDF(params, tuple(pieces), tuple(frob))


def pdf_from_json(doc: dict) -> PiecewisePDF:
    from .core import validate_params

    params = validate_params(int(doc["N"]), doc["a"], doc["b"], doc["beta"])
    pieces = []
    for d in doc["pieces"]:
        f = tuple(to_rational(c) for c in d["coeffs"])
        w = d["weight"]
        weight = float(w) if ("." in w or "e" in w.lower()) and "/" not in w else to_rational(w)
        pieces.append(Piece(int(d["p"]), weight, to_rational(d["gamma"]), f,
                            not doc.get("partial", False)))
    return PiecewisePDF(params, tuple(pieces))


# ---------------------------------------------------------------------------
# evaluation


def _series_value(pc: Piece, s: float) -> float:
    acc = 0.0
    for c in reversed(pc.f):
        acc = acc * s + float(c)
    return float(pc.weight) * s ** float(pc.gamma) * acc


def pdf_eval(pdf: PiecewisePDF, t, continuation: bool = False):
    """Density at ``t``.  Exact for rational ``t`` in polynomial mode."""
    N = pdf.params.N
    if t < 0 or t > N:
        raise OutOfSupportError(f"t={t} outside [0, {N}]")
    if pdf.polynomial:
        if isinstance(t, float):
            return float(pdf.piecewise.evaluate_float(t)[0])
        return pdf.piecewise.evaluate(t)
    return float(pdf_eval_grid(pdf, [float(t)], continuation=continuation)[0])


def pdf_eval_grid(pdf: PiecewisePDF, ts: Sequence[float], continuation: bool = False) -> np.ndarray:
    """Float density on an array of points."""
    ts = np.asarray(ts, dtype=float)
    if pdf.polynomial:
        return pdf.piecewise.evaluate_float(ts)
    N = pdf.params.N
    if np.any((ts < 0) | (ts > N)):
        raise OutOfSupportError(f"points outside [0, {N}]")
    out = np.zeros_like(ts)
    for pc in pdf.pieces:
        s = ts - pc.p
        active = s > 0
        near = active & (s < float(SERIES_TRUST))
        for i in np.nonzero(near)[0]:
            out[i] += _series_value(pc, s[i])
        far = active & ~near
        if far.any():
            if not continuation:
                raise RegimeError(
                    "truncated series is trusted only for t - p < 0.9; "
                    "enable the experimental continuation to go further")
            out[far] += pc_continued_values(pdf, pc.p, s[far])
    return out


def pdf_cdf(pdf: PiecewisePDF, t):
    if not pdf.polynomial:
        raise RegimeError("exact cdf needs polynomial mode")
    return pdf.piecewise.cdf(t)


def pdf_moment(pdf: PiecewisePDF, k: int):
    """``integral t**k P(t) dt`` exactly, piece by piece."""
    if not pdf.polynomial:
        raise RegimeError("exact moments need polynomial mode")
    N = pdf.params.N
    total = Fraction(0)
    for pc in pdf.pieces:
        L = N - pc.p
        g = int(pc.gamma)
        # integral_0^L (s + p)^k s^(g+m) ds
        binom_terms = [(math.comb(k, i) * pc.p ** (k - i), i) for i in range(k + 1)]
        acc = Fraction(0)
        for m, c in enumerate(pc.f):
            if c == 0:
                continue
            inner = Fraction(0)
            for coef, i in binom_terms:
                if coef:
                    e = g + m + i + 1
                    inner += Fraction(coef * L ** e, e)
            acc += c * inner
        total += pc.weight * acc
    return total


def reflect(pdf) -> PiecewisePolynomial:
    """Density of the swapped parameters ``a <-> b``, obtained as ``t -> N - t``."""
    pw = pdf.piecewise if isinstance(pdf, PiecewisePDF) else pdf
    return pw.reflected()


# ---------------------------------------------------------------------------
# closed forms


def closed_form_n2(params: EnsembleParams, t):
    """Density for ``N = 2`` through a single Gauss hypergeometric function.

    Valid for any ``a, b > -1`` and ``beta >= 0``; the interval ``(1, 2)`` is
    handled through the ``a <-> b`` reflection.
    """
    if params.N != 2:
        raise ValueError("closed_form_n2 needs N = 2")
    if t < 0 or t > 2:
        raise OutOfSupportError(f"t={t} outside [0, 2]")
    if t > 1:
        return closed_form_n2(params.swapped(), 2 - t)
    a, b, beta = as_scalar(params.a), as_scalar(params.b), as_scalar(params.beta)
    const = _gp(a + b + 2 + beta / 2) * _gp(a + b + 2 + beta) \
        / (_gp(2 * a + 2 + beta) * _gp(b + 1) * _gp(b + 1 + beta / 2))
    A, B, C = (beta + 1) / 2, -b, a + (beta + 3) / 2
    exact = (not isinstance(t, float) and params.exact and is_integer(2 * a + 1 + beta)
             and is_integer(2 * b) and is_nonneg_integer(b)
             and isinstance(const, GammaProduct) and const.is_rational)
    if exact:
        t = to_rational(t)
        x = (t / (2 - t)) ** 2
        return const.coeff * t ** int(2 * a + 1 + beta) * (1 - t / 2) ** int(2 * b) \
            * gauss_2f1(A, B, C, x)
    tf = float(t)
    x = (tf / (2 - tf)) ** 2
    if x >= 1:
        hyp = _gauss_at_one(float(A), float(B), float(C))
    else:
        hyp = float(gauss_2f1(A, B, C, x))
    return float(const) * tf ** float(2 * a + 1 + beta) * (1 - tf / 2) ** float(2 * b) * hyp


def _gp(q):
    from .core import gamma
    return gamma(q)


def _gauss_at_one(A: float, B: float, C: float) -> float:
    return math.exp(math.lgamma(C) + math.lgamma(C - A - B) - math.lgamma(C - A) - math.lgamma(C - B)) \
        * _gamma_sign(C) * _gamma_sign(C - A - B) * _gamma_sign(C - A) * _gamma_sign(C - B)


def _gamma_sign(x: float) -> int:
    if x > 0:
        return 1
    return 1 if math.floor(x) % 2 == 0 else -1


def hypergeometric_pdf_01(params: EnsembleParams, t, case: str):
    """Density on ``[0, 1)`` in the two hypergeometric cases ``b = 1`` and ``b = -beta/2``."""
    N = params.N
    a, b, beta = as_scalar(params.a), as_scalar(params.b), as_scalar(params.beta)
    if not 0 <= t < 1:
        raise OutOfSupportError("hypergeometric form holds for 0 <= t < 1")
    rate = beta * N * (N - 1) / 2 + N * (a + 1)
    if case == "b=1":
        if b != 1:
            raise ValueError(f"parameter mismatch: case b=1 but b={b}")
        hyp = gauss_2f1(-N, -(N - 1) - 2 * (a + 1) / beta, rate, -beta * as_scalar(t) / 2)
    elif case == "b=-beta/2":
        if b != -beta / 2:
            raise ValueError(f"parameter mismatch: case b=-beta/2 but b={b}")
        if not beta < 2:
            raise ValueError("case b=-beta/2 needs beta < 2")
        hyp = gauss_2f1(beta * N / 2, beta * (N - 1) / 2 + a + 1, rate, as_scalar(t))
    else:
        raise ValueError(f"unknown case {case!r}")
    pref = exact_or_float(fixed_trace_f(N, a, beta) / selberg(N, a, b, beta))
    g0 = rate - 1
    if isinstance(pref, Fraction) and not isinstance(hyp, float) and not isinstance(t, float) \
            and is_integer(g0):
        return pref * to_rational(t) ** int(g0) * hyp
    return float(pref) * float(t) ** float(g0) * float(hyp)


# ---------------------------------------------------------------------------
# experimental continuation through ordinary points


def _singular_points(N: int, p: int) -> np.ndarray:
    return np.array([N - p - j for j in range(N + 1)], dtype=float)


def _taylor_step(Xf: np.ndarray, lam: np.ndarray, center: complex, state: np.ndarray,
                 h: complex, order: int) -> np.ndarray:
    """Advance ``state`` from ``center`` to ``center + h`` with a Taylor series."""
    inv = 1.0 / (lam + center)
    coef = state.astype(complex)
    total = coef.copy()
    hk = 1.0
    scale = np.max(np.abs(state)) or 1.0
    tail = []
    for k in range(order):
        coef = inv * (Xf @ coef - k * coef) / (k + 1)
        hk *= h
        term = coef * hk
        total += term
        tail.append(np.max(np.abs(term)))
    last = max(tail[-3:]) if tail else 0.0
    if not np.isfinite(last) or last > 1e-12 * max(scale, np.max(np.abs(total))):
        raise StepRejectedError(f"Taylor tail {last:.3g} too large at order {order}")
    return total


def _augmented_system(params: EnsembleParams, p: int, levels: int):
    """Float matrix and diagonal for a state carrying ``levels`` Laurent orders in ``b``.

    The system matrix is affine in ``b``: ``X(b + e) = X0 + e X1``.  Writing the
    state as ``sum_i e**(i - levels + 1) G_i`` gives a block lower-bidiagonal
    system with ``X0`` on the diagonal and ``X1`` below it.
    """
    N = params.N
    a, b, beta = as_scalar(params.a), as_scalar(params.b), as_scalar(params.beta)
    X0 = np.array(_tridiag(N, a, b, beta).matrix(), dtype=float)
    X1 = np.array(_tridiag(N, a, b + 1, beta).matrix(), dtype=float) - X0
    n = N + 1
    Xf = np.zeros((levels * n, levels * n))
    for i in range(levels):
        Xf[i * n:(i + 1) * n, i * n:(i + 1) * n] = X0
        if i > 0:
            Xf[i * n:(i + 1) * n, (i - 1) * n:i * n] = X1
    lam = np.tile(np.array(tridiag(params).lambda_p(p), dtype=float), levels)
    return Xf, lam


def continue_ordinary(params: EnsembleParams, p: int, state, s0, target_s, order: int = 60,
                      ratio: float = 0.5) -> np.ndarray:
    """[EXPERIMENTAL] Carry a solution vector of the shifted system from ``s0`` to ``target_s``.

    Steps are Taylor expansions about ordinary points, each of length at most
    ``ratio`` times the distance to the nearest singular point.  Segments that
    would cross a singular point detour through ``Im s = 1/2``; a singular
    target is reached by averaging over a small circle around it.  A state
    whose length is a multiple ``L`` of ``N + 1`` is read as ``L`` Laurent
    levels in ``b`` (see :func:`frobenius_state`).  Known to be unreliable for
    some parameters; a :class:`ContinuationWarning` is issued.
    """
    warnings.warn("ordinary-point continuation is experimental and may be unstable",
                  ContinuationWarning, stacklevel=2)
    state = np.asarray(state, dtype=complex)
    levels, rem = divmod(len(state), params.N + 1)
    if rem or levels < 1:
        raise ValueError(f"state length {len(state)} is not a multiple of N+1={params.N + 1}")
    Xf, lam = _augmented_system(params, p, levels)
    return _continue(Xf, lam, _singular_points(params.N, p), state, complex(s0),
                     complex(target_s), order, ratio)


def _continue(Xf, lam, sing, state, s0, target, order, ratio, circle_points: int = 24):
    if s0 == target:
        return state.copy()
    if np.min(np.abs(sing - s0)) == 0:
        raise ValueError("cannot start the continuation at a singular point")

    def walk(cur, state, wp):
        while cur != wp:
            dist = np.min(np.abs(sing - cur))
            remaining = abs(wp - cur)
            if remaining <= ratio * dist:
                return wp, _taylor_step(Xf, lam, cur, state, wp - cur, order)
            h = (wp - cur) / remaining * ratio * dist
            state = _taylor_step(Xf, lam, cur, state, h, order)
            cur = cur + h
        return cur, state

    lo, hi = sorted((s0.real, target.real))
    crosses = np.any((sing > lo) & (sing < hi))
    target_singular = np.min(np.abs(sing - target)) == 0
    if not (crosses or target_singular):
        return walk(s0, state, target)[1]
    lift = 0.5j
    cur, state = walk(s0, state, s0 + lift)
    cur, state = walk(cur, state, target + lift)
    if not target_singular:
        return walk(cur, state, target)[1]
    # mean value over a circle: exact for the components analytic at the target
    r = 0.25
    cur, state = walk(cur, state, target + r * 1j)
    total = np.zeros_like(state)
    for k in range(circle_points):
        wp = target + r * np.exp(1j * (np.pi / 2 + 2 * np.pi * k / circle_points))
        cur, state = walk(cur, state, wp)
        total += state
    return total / circle_points


def frobenius_state(pdf: PiecewisePDF, p: int, s0: float, n_terms: int = 80) -> np.ndarray:
    """Float value at ``s0`` of the full vector solution behind piece ``p``.

    Normalised so that its last component equals ``s**gamma_p * F_p(s)``.
    When the leading coefficient vanishes at ``b`` (so ``F_p`` is a limit in
    ``b``), the vector itself diverges like ``e**-r``; the result then stacks
    the Laurent levels ``e**-r .. e**0`` and has length ``(r + 1)(N + 1)``.
    """
    params = pdf.params
    N = params.N
    fp = pdf.frobenius[p] if pdf.frobenius else frobenius_piece(params, p)
    if fp.lead != 0:
        system = tridiag(params)
        g = frobenius_vectors(system, p, max(n_terms, len(fp.g)), check=False)
        nu = float(fp.v)
        vec = np.zeros(N + 1)
        for l, gl in enumerate(g):
            vec += np.array([float(x / fp.lead) for x in gl]) * s0 ** (nu + l)
        return vec
    eps = _Eps((as_scalar(params.b), 1) + (0,) * (_Eps.R - 1))
    system = _tridiag(N, as_scalar(params.a), eps, as_scalar(params.beta))
    g = frobenius_vectors(system, p, n_terms, check=False)
    lead = g[p][N]
    r = lead.valuation()
    if r is None or 2 * r > _Eps.R:
        raise ZeroLeadingCoefficientError(f"cannot resolve the b-limit of piece {p}")
    levels = r + 1
    # g / (lead / e**r), known to order e**(R - r) >= e**r
    unit = _Eps(lead.c[r:] + (0,) * r)
    nu0 = float(_const(system.v[N - p]))
    acc = np.zeros((levels, N + 1))
    for l, gl in enumerate(g):
        rows = [(x / unit) if isinstance(x, _Eps) else _Eps.lift(x) / unit for x in gl]
        coeffs = np.array([[float(x.c[i]) for x in rows] for i in range(levels)])
        acc += coeffs * s0 ** (nu0 + l)
    # s**nu carries exp(p e log s)
    ls = p * math.log(s0)
    expo = np.array([ls ** i / math.factorial(i) for i in range(levels)])
    out = np.zeros((levels, N + 1))
    for i in range(levels):
        for j in range(i + 1):
            out[i] += expo[i - j] * acc[j]
    return out.reshape(-1)


def pc_continued_values(pdf: PiecewisePDF, p: int, targets: np.ndarray, s0: float = 0.5,
                        order: int = 60) -> np.ndarray:
    """Piece ``p`` at ``s`` in ``targets`` via the ordinary-point continuation."""
    pc = pdf.pieces[p]
    N = pdf.params.N
    start = frobenius_state(pdf, p, s0)
    levels = len(start) // (N + 1)
    Xf, lam = _augmented_system(pdf.params, p, levels)
    sing = _singular_points(N, p)
    out = np.empty(len(targets))
    weight = float(pc.weight)
    cur_s, cur = complex(s0), start.astype(complex)
    for i in np.argsort(targets):
        s = complex(targets[i])
        val = _continue(Xf, lam, sing, cur, cur_s, s, order, 0.5)
        out[i] = weight * val[-1].real
        if np.min(np.abs(sing - s.real)) > 0:
            cur_s, cur = s, val
    return out

