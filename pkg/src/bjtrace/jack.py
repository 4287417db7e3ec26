"""Partitions, Jack polynomial special values and the partition-sum formulas.

Everything here is an *oracle* for the recurrences in :mod:`bjtrace.laplace`
and :mod:`bjtrace.tracedist`: moments of the trace as a sum over partitions,
the coefficients of the density's expansion on ``[0, 1]``, and the duality
``(N, beta, a, b) -> (-beta N/2, 4/beta, -2a/beta, -2b/beta)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

from .core import EnsembleParams, Number, as_scalar, is_nonneg_integer


class NonConvergentError(ArithmeticError):
    pass


@dataclass(frozen=True, order=True)
class Partition:
    """Weakly decreasing positive parts; boxes are indexed ``(i, j)`` from 0."""

    parts: tuple = ()

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts if x != 0)
        if any(x < 0 for x in parts) or any(x < y for x, y in zip(parts, parts[1:])):
            raise ValueError(f"not a partition: {self.parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for x in self.parts if x > j) for j in range(self.parts[0])))

    def boxes(self) -> Iterator[tuple[int, int]]:
        for i, row in enumerate(self.parts):
            for j in range(row):
                yield i, j

    def arm(self, i: int, j: int) -> int:
        return self.parts[i] - j - 1

    def coarm(self, i: int, j: int) -> int:
        return j

    def leg(self, i: int, j: int) -> int:
        return sum(1 for row in self.parts[i + 1:] if row > j)

    def coleg(self, i: int, j: int) -> int:
        return i

    def __iter__(self):
        return iter(self.parts)

    def __repr__(self):
        return f"Partition{self.parts}"


def partitions_of(k: int, max_parts: int | None = None) -> list[Partition]:
    """All partitions of ``k`` with at most ``max_parts`` parts, reverse-lexicographic."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    limit = k if max_parts is None else max_parts
    return [Partition(p) for p in _partitions(k, k, limit)]


@lru_cache(maxsize=None)
def _partitions(k: int, largest: int, parts_left: int) -> tuple:
    if k == 0:
        return ((),)
    if parts_left == 0:
        return ()
    out = []
    for first in range(min(k, largest), 0, -1):
        for rest in _partitions(k - first, first, parts_left - 1):
            out.append((first,) + rest)
    return tuple(out)


def pochhammer(u, k: int):
    """Rising factorial ``(u)_k``."""
    out = 1
    for i in range(k):
        out *= u + i
    return out


def gen_pochhammer(u, kappa: Partition, alpha):
    """Generalised Pochhammer symbol ``[u]_kappa^(alpha)`` as a finite product.

    No Gamma functions are involved, so formal (negative) ``u`` is fine.
    """
    alpha = as_scalar(alpha)
    out = 1
    for j, part in enumerate(kappa.parts):
        base = u - j / alpha
        for i in range(part):
            out *= base + i
    return out


def jack_unity(kappa: Partition, alpha, n):
    """``C_kappa^(alpha)(1, ..., 1)`` with ``n`` ones; ``n`` may be formal."""
    b = d = h = 1
    for i, j in kappa.boxes():
        a_, l_ = kappa.arm(i, j), kappa.leg(i, j)
        b *= alpha * kappa.coarm(i, j) + n - kappa.coleg(i, j)
        d *= alpha * (a_ + 1) + l_
        h *= alpha * a_ + l_ + 1
    k = kappa.weight
    return alpha ** k * math.factorial(k) * b / (d * h)


# ---------------------------------------------------------------------------
# moments


@dataclass(frozen=True)
class DerivedParams:
    u1: Number
    u2: Number
    alpha: Number

    @classmethod
    def of(cls, params: EnsembleParams) -> "DerivedParams":
        return cls(*_derived(params.N, params.a, params.b, params.beta))


def _derived(N, a, b, beta):
    if beta == 0:
        raise ValueError("Jack-polynomial formulas need beta > 0")
    half = beta / 2
    u1 = half * (N - 1) + a + 1
    u2 = beta * (N - 1) + a + b + 2
    alpha = 2 / beta if isinstance(beta, float) else Fraction(2) / beta
    return u1, u2, alpha


def _moment_sum(N, a, b, beta, k: int, max_parts: int):
    u1, u2, alpha = _derived(N, a, b, beta)
    total = 0
    for kappa in partitions_of(k, max_parts):
        c = jack_unity(kappa, alpha, N)
        if c == 0:
            continue
        total += gen_pochhammer(u1, kappa, alpha) / gen_pochhammer(u2, kappa, alpha) * c
    return total


def moment_oracle(params: EnsembleParams, k: int):
    """``k``-th moment of the trace as a sum over partitions of ``k`` (length <= N)."""
    p = params
    return _moment_sum(p.N, p.a, p.b, p.beta, k, min(k, p.N))


def moment_dual(params: EnsembleParams, k: int):
    """The same moment evaluated through the dual (formal) parameter set.

    Sums over every partition of ``k``; terms whose Jack value vanishes are
    dropped before dividing, which is how the length restriction re-enters.
    """
    p = params
    beta = as_scalar(p.beta)
    if beta == 0:
        raise ValueError("duality needs beta > 0")
    N2 = -beta * p.N / 2
    beta2 = 4 / beta
    a2 = -2 * as_scalar(p.a) / beta
    b2 = -2 * as_scalar(p.b) / beta
    return (-2 / beta) ** k * _moment_sum(N2, a2, b2, beta2, k, k)


# ---------------------------------------------------------------------------
# expansion of the density on [0, 1]


def _fixed_trace_rate(params: EnsembleParams):
    N, a, beta = params.N, as_scalar(params.a), as_scalar(params.beta)
    return beta * N * (N - 1) / 2 + N * (a + 1)


def alpha_coeff(params: EnsembleParams, p: int, method: str = "auto"):
    """Coefficient of ``t**p`` in the normalised series of the density on ``[0, 1]``.

    ``method="sum"`` forces the partition sum; ``"auto"`` uses the
    hypergeometric closed forms when ``b == 1`` or ``b == -beta/2``.
    """
    N = params.N
    a, b, beta = as_scalar(params.a), as_scalar(params.b), as_scalar(params.beta)
    if beta == 0:
        raise ValueError("alpha_coeff needs beta > 0")
    if p == 0:
        return Fraction(1) if params.exact else 1.0
    rate = _fixed_trace_rate(params)
    denom = math.factorial(p) * pochhammer(rate, p)
    if method == "auto" and b == 1:
        num = pochhammer(-N, p) * pochhammer(-(N - 1) - 2 * (a + 1) / beta, p) * (-beta / 2) ** p
        return num / denom
    if method == "auto" and b == -beta / 2:
        num = pochhammer(beta * N / 2, p) * pochhammer(beta * (N - 1) / 2 + a + 1, p)
        return num / denom
    if method not in ("auto", "sum"):
        raise ValueError(f"unknown method {method!r}")
    alpha = 2 / beta
    shift = a + beta * (N - 1) / 2 + 1
    total = 0
    for kappa in partitions_of(p, min(p, N)):
        if is_nonneg_integer(b) and kappa.parts[0] > b:
            continue  # [-b]_kappa has a zero factor
        total += gen_pochhammer(-b, kappa, alpha) * gen_pochhammer(shift, kappa, alpha) \
            * jack_unity(kappa, alpha, N)
    return total / denom


# ---------------------------------------------------------------------------
# Gauss hypergeometric series


def _is_nonpos_int(x) -> bool:
    return is_nonneg_integer(-x) if not isinstance(x, float) else (x <= 0 and x.is_integer())


def gauss_2f1(A, B, C, x, tol: float = 1e-16, max_terms: int = 100000):
    """``2F1(A, B; C; x)`` by direct summation.

    Terminating series (``A`` or ``B`` a nonpositive integer) are summed
    exactly when the arguments are exact.  Otherwise the sum runs in floating
    point until the relative term size drops below ``tol``.
    """
    A, B, C = as_scalar(A), as_scalar(B), as_scalar(C)
    x = as_scalar(x)
    stops = [int(-v) for v in (A, B) if _is_nonpos_int(v)]
    if stops:
        n = min(stops)
        term = Fraction(1) if not isinstance(x, float) else 1.0
        total = term
        for k in range(n):
            if C + k == 0:
                raise ZeroDivisionError("2F1 lower parameter hits a pole before termination")
            term = term * (A + k) * (B + k) / ((C + k) * (k + 1)) * x
            total += term
        return total
    if _is_nonpos_int(C):
        raise ZeroDivisionError("2F1 lower parameter is a nonpositive integer")
    xf = float(x)
    if abs(xf) >= 1:
        raise NonConvergentError(f"2F1 series does not converge at x={xf}")
    Af, Bf, Cf = float(A), float(B), float(C)
    term = total = 1.0
    for k in range(max_terms):
        term *= (Af + k) * (Bf + k) / ((Cf + k) * (k + 1)) * xf
        total += term
        if abs(term) <= tol * abs(total):
            return total
    raise NonConvergentError(f"2F1 did not reach tolerance after {max_terms} terms (x={xf})")
