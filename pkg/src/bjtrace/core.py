"""Exact scalars, polynomials and parameter validation shared by every module.

Exact quantities are :class:`fractions.Fraction` (arbitrary precision
integers underneath).  Quantities that involve Gamma functions at
non-integer points are carried as :class:`GammaProduct`, a rational
coefficient times a product of ``Gamma(r) ** e`` with ``r`` in ``(0, 1)``.
Plain ``float`` values flow through the same functions and make the result
a float (the "float path").
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence, Union

Number = Union[int, Fraction, float]


class ParameterError(ValueError):
    """Invalid ensemble parameters.  ``code`` is a short machine-readable tag."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


class RegimeError(ValueError):
    """The requested computation is not available for these parameters."""


# ---------------------------------------------------------------------------
# rationals


def to_rational(x) -> Fraction:
    """Convert ``int``, ``Fraction`` or a string (``"num/den"`` or decimal) exactly.

    Floats are rejected; use :func:`as_scalar` when floats are acceptable.
    """
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {x!r}") from exc
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def as_scalar(x) -> Number:
    """Like :func:`to_rational` but lets floats through unchanged."""
    if isinstance(x, float):
        return x
    return to_rational(x)


def format_rational(q) -> str:
    """Canonical ``"num/den"`` string (``"n"`` for integers).

    Raises ``TypeError`` for a :class:`GammaProduct` with leftover Gamma factors.
    """
    if isinstance(q, GammaProduct):
        q = q.to_fraction()
    q = to_rational(q)
    return str(q)


def is_integer(x) -> bool:
    if isinstance(x, float):
        return x.is_integer()
    return to_rational(x).denominator == 1


def is_nonneg_integer(x) -> bool:
    return is_integer(x) and x >= 0


# ---------------------------------------------------------------------------
# parameters


@dataclass(frozen=True)
class EnsembleParams:
    """The quadruple ``(N, a, b, beta)`` of the beta-Jacobi ensemble."""

    N: int
    a: Number
    b: Number
    beta: Number

    @property
    def exact(self) -> bool:
        return not any(isinstance(v, float) for v in (self.a, self.b, self.beta))

    @property
    def moments_ok(self) -> bool:
        return True

    @property
    def assembly_ok(self) -> bool:
        """``b`` and ``beta`` nonnegative integers: the piecewise density is available."""
        return is_nonneg_integer(self.b) and is_nonneg_integer(self.beta)

    @property
    def polynomial_ok(self) -> bool:
        """Additionally ``a`` a nonnegative integer: every piece is a polynomial."""
        return self.assembly_ok and is_nonneg_integer(self.a)

    def swapped(self) -> "EnsembleParams":
        return EnsembleParams(self.N, self.b, self.a, self.beta)

    def as_json(self) -> dict:
        def fmt(v):
            return repr(v) if isinstance(v, float) else format_rational(v)

        return {"N": self.N, "a": fmt(self.a), "b": fmt(self.b), "beta": fmt(self.beta)}


def validate_params(N, a, b, beta) -> EnsembleParams:
    if isinstance(N, bool) or not is_integer(N) or N < 1:
        raise ParameterError("bad_dimension", f"N must be a positive integer, got {N!r}")
    a, b, beta = as_scalar(a), as_scalar(b), as_scalar(beta)
    if a <= -1:
        raise ParameterError("a_not_normalisable", f"need a > -1, got {a}")
    if b <= -1:
        raise ParameterError("b_not_normalisable", f"need b > -1, got {b}")
    if beta < 0:
        raise ParameterError("negative_beta", f"need beta >= 0, got {beta}")
    return EnsembleParams(int(N), a, b, beta)


# ---------------------------------------------------------------------------
# Gamma products


@dataclass(frozen=True)
class GammaProduct:
    """``coeff * prod(Gamma(r) ** e for r, e in residues)`` with ``0 < r < 1``.

    Products and quotients only add exponents, so ratios such as
    ``Gamma(q + m) / Gamma(q)`` come out as pure rationals.
    """

    coeff: Fraction
    residues: tuple = ()  # sorted ((r, e), ...) with e != 0

    @classmethod
    def _make(cls, coeff: Fraction, residues: Mapping[Fraction, int]) -> "GammaProduct":
        return cls(coeff, tuple(sorted((r, e) for r, e in residues.items() if e != 0)))

    @property
    def is_rational(self) -> bool:
        return not self.residues

    def to_fraction(self) -> Fraction:
        if self.residues:
            raise TypeError(f"Gamma factors do not cancel: {self.residues}")
        return self.coeff

    def __float__(self) -> float:
        if self.coeff == 0:
            return 0.0
        logs = sum(e * math.lgamma(float(r)) for r, e in self.residues)
        sign = 1 if self.coeff > 0 else -1
        return sign * math.exp(_log_abs_fraction(self.coeff) + logs)

    def _combine(self, other: "GammaProduct", sign: int) -> "GammaProduct":
        res = dict(self.residues)
        for r, e in other.residues:
            res[r] = res.get(r, 0) + sign * e
        coeff = self.coeff * other.coeff if sign > 0 else self.coeff / other.coeff
        return GammaProduct._make(coeff, res)

    def __mul__(self, other):
        if isinstance(other, GammaProduct):
            return self._combine(other, 1)
        if isinstance(other, float):
            return float(self) * other
        if isinstance(other, Rational):
            return GammaProduct(self.coeff * other, self.residues)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GammaProduct):
            return self._combine(other, -1)
        if isinstance(other, float):
            return float(self) / other
        if isinstance(other, Rational):
            return GammaProduct(self.coeff / other, self.residues)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, float):
            return other / float(self)
        if isinstance(other, Rational):
            return GammaProduct(Fraction(other), ()) / self
        return NotImplemented

    def __pow__(self, n: int) -> "GammaProduct":
        return GammaProduct._make(self.coeff ** n, {r: e * n for r, e in self.residues})

    def __eq__(self, other):
        if isinstance(other, GammaProduct):
            return self.coeff == other.coeff and self.residues == other.residues
        if isinstance(other, Rational):
            return not self.residues and self.coeff == other
        return NotImplemented

    def __hash__(self):
        return hash((self.coeff, self.residues))

    def __repr__(self):
        if not self.residues:
            return f"GammaProduct({self.coeff})"
        g = " * ".join(f"Gamma({r})^{e}" for r, e in self.residues)
        return f"GammaProduct({self.coeff} * {g})"


def _log_abs_fraction(q: Fraction) -> float:
    n, d = abs(q.numerator), q.denominator
    return math.log(n) - math.log(d)


ONE = GammaProduct(Fraction(1))


def gamma_value(q) -> GammaProduct:
    """Exact ``Gamma(q)`` for rational ``q > 0``."""
    q = to_rational(q)
    if q <= 0:
        raise ValueError(f"Gamma({q}) is not representable (q must be > 0)")
    m = math.ceil(q) - 1
    r = q - m  # r in (0, 1]
    coeff = Fraction(1)
    for i in range(m):
        coeff *= r + i
    if r == 1:
        return GammaProduct(coeff)
    return GammaProduct(coeff, ((r, 1),))


def gamma(q):
    """``Gamma`` dispatching on the argument: exact for rationals, float for floats."""
    if isinstance(q, float):
        return math.gamma(q)
    return gamma_value(q)


def exact_or_float(x):
    """Collapse a :class:`GammaProduct` to a ``Fraction`` when possible, else a float."""
    if isinstance(x, GammaProduct):
        return x.coeff if x.is_rational else float(x)
    return x


# ---------------------------------------------------------------------------
# polynomials


class RationalPolynomial:
    """Dense univariate polynomial, ``coeffs[i]`` multiplies ``x**i``.

    Coefficients are normally ``Fraction``; floats work too but lose exactness.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, k: int, c=Fraction(1)) -> "RationalPolynomial":
        return cls([Fraction(0)] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other):
        if isinstance(other, RationalPolynomial):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RationalPolynomial([{', '.join(str(c) for c in self.coeffs)}])"

    def __add__(self, other):
        if not isinstance(other, RationalPolynomial):
            other = RationalPolynomial([other])
        n = max(len(self), len(other))
        return RationalPolynomial(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, RationalPolynomial) else -other)

    def __mul__(self, other):
        if not isinstance(other, RationalPolynomial):
            return self.scale(other)
        if not self.coeffs or not other.coeffs:
            return RationalPolynomial()
        out = [0] * (len(self) + len(other) - 1)
        for i, x in enumerate(self.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(other.coeffs):
                out[i + j] += x * y
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def scale(self, c) -> "RationalPolynomial":
        return RationalPolynomial(c * x for x in self.coeffs)

    def __call__(self, x):
        return self.evaluate(x)

    def evaluate(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def antiderivative(self) -> "RationalPolynomial":
        """Antiderivative vanishing at 0."""
        return RationalPolynomial([0] + [Fraction(c, i + 1) if isinstance(c, int) else c / (i + 1)
                                         for i, c in enumerate(self.coeffs)])

    def definite_integral(self, lo, hi):
        F = self.antiderivative()
        return F.evaluate(hi) - F.evaluate(lo)

    def shift(self, h) -> "RationalPolynomial":
        """Coefficients of ``x -> self(x + h)`` (Taylor shift)."""
        c = list(self.coeffs)
        n = len(c)
        for i in range(n - 1):
            for j in range(n - 2, i - 1, -1):
                c[j] += h * c[j + 1]
        return RationalPolynomial(c)

    def compose_negate(self) -> "RationalPolynomial":
        """Coefficients of ``x -> self(-x)``."""
        return RationalPolynomial(c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs))

