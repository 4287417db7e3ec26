"""Power series of the Fourier-Laplace transform via the (N+1)-vector recurrence.

The vector ``c_l = [c_{p,l}]_{p=0..N}`` of Taylor coefficients of the
auxiliary integrals ``H_p(x)`` obeys ``(l I - Y) c_l = X c_{l-1}``.  ``Y`` is
lower bidiagonal, so each step is a forward substitution.  The last
component of ``c_l`` is ``(-1)^l m_l / l!``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import EnsembleParams, RegimeError, as_scalar
from .normalization import selberg

DEFAULT_ORDER = 64


@dataclass(frozen=True)
class LadderCoefficients:
    Btilde: tuple
    Dtilde: tuple


def ladder(params: EnsembleParams) -> LadderCoefficients:
    N = params.N
    a, b, beta = as_scalar(params.a), as_scalar(params.b), as_scalar(params.beta)
    Bt = tuple(p * (a + b + 1 + beta * (2 * N - p - 1) / 2) for p in range(N + 1))
    Dt = tuple(p * (beta * (N - p) / 2 + b) for p in range(N + 1))
    return LadderCoefficients(Bt, Dt)


def build_xy(params: EnsembleParams) -> tuple[np.ndarray, np.ndarray]:
    """The matrices ``X`` and ``Y`` as object arrays of exact entries."""
    N = params.N
    lad = ladder(params)
    X = np.zeros((N + 1, N + 1), dtype=object)
    Y = np.zeros((N + 1, N + 1), dtype=object)
    for p in range(N + 1):
        X[p, p] = -(N - p)
        if p < N:
            X[p, p + 1] = N - p
        Y[p, p] = -lad.Btilde[p]
        if p > 0:
            Y[p, p - 1] = lad.Dtilde[p]
    return X, Y


def c0_vector(params: EnsembleParams, normalized: bool = True) -> list:
    """Constant terms ``c_{p,0}``.

    With ``normalized`` the last entry is 1; otherwise it is the Selberg
    integral ``S_N(a, b, beta)``.  Needs ``b > 0`` (for ``b <= 0`` the
    integrals ``H_p`` with ``p < N`` diverge).
    """
    if params.b <= 0:
        raise RegimeError(f"c_(p,0) for p < N diverge when b <= 0 (b={params.b})")
    N = params.N
    lad = ladder(params)
    top = Fraction(1) if normalized else selberg(N, params.a, params.b, params.beta)
    if isinstance(params.b, float) or isinstance(params.a, float) or isinstance(params.beta, float):
        top = 1.0 if normalized else float(top)
    c = [None] * (N + 1)
    c[N] = top
    for p in range(N, 0, -1):
        c[p - 1] = c[p] * lad.Btilde[p] / lad.Dtilde[p]
    return c


def _step(lad: LadderCoefficients, N: int, c_prev: list, l: int) -> list:
    Xc = [-(N - p) * c_prev[p] + ((N - p) * c_prev[p + 1] if p < N else 0) for p in range(N + 1)]
    out = [None] * (N + 1)
    below = 0
    for p in range(N + 1):
        diag = l + lad.Btilde[p]
        assert diag != 0, "l + Btilde_p vanished"
        below = (Xc[p] + lad.Dtilde[p] * below) / diag
        out[p] = below
    return out


def coeff_step(params: EnsembleParams, c_prev, l: int) -> list:
    """One step of the recurrence: solve ``(l I - Y) c_l = X c_{l-1}``."""
    if l < 1:
        raise ValueError("l must be >= 1")
    return _step(ladder(params), params.N, list(c_prev), l)


@dataclass(frozen=True)
class CoeffTable:
    """``c[p][l]`` for ``p = 0..N`` and ``l = 0..order``."""

    params: EnsembleParams
    c: tuple
    normalized: bool = True

    @property
    def order(self) -> int:
        return len(self.c[0]) - 1

    def column(self, l: int) -> list:
        return [row[l] for row in self.c]

    def to_json(self) -> dict:
        from .core import format_rational

        def fmt(v):
            return repr(v) if isinstance(v, float) else format_rational(v)

        return {"params": self.params.as_json(), "normalized": self.normalized,
                "c": [[fmt(v) for v in row] for row in self.c]}


def hhat_series(params: EnsembleParams, order: int = DEFAULT_ORDER, normalized: bool = True) -> CoeffTable:
    """Full table of Taylor coefficients ``c_{p,l}`` of the vector ``H(x)``."""
    if order < 0:
        raise ValueError("order must be >= 0")
    N = params.N
    lad = ladder(params)
    cols = [c0_vector(params, normalized)]
    for l in range(1, order + 1):
        cols.append(_step(lad, N, cols[-1], l))
    rows = tuple(tuple(col[p] for col in cols) for p in range(N + 1))
    return CoeffTable(params, rows, normalized)


def _final_component_series(params: EnsembleParams, k_max: int) -> list:
    """``(c_l)_N`` for ``l = 0..k_max`` (requires ``b > 0``)."""
    N = params.N
    lad = ladder(params)
    c = c0_vector(params)
    out = [c[N]]
    for l in range(1, k_max + 1):
        c = _step(lad, N, c, l)
        out.append(c[N])
    return out


def _first_component_series(params: EnsembleParams, k_max: int) -> list:
    """``(c_l)_0 / (c_0)_0`` computed with ``b`` replaced by ``b + 1``."""
    shifted = EnsembleParams(params.N, params.a, params.b + 1, params.beta)
    lad = ladder(shifted)
    c = c0_vector(shifted)
    head = c[0]
    out = [c[0] / head]
    for l in range(1, k_max + 1):
        c = _step(lad, params.N, c, l)
        out.append(c[0] / head)
    return out


def moments(params: EnsembleParams, k_max: int, route: str = "auto") -> list:
    """Moments ``m_0 .. m_{k_max}`` of the trace.

    ``route="final"`` reads the last component (needs ``b > 0``);
    ``route="first"`` reads the first component at ``b + 1`` (any ``b > -1``).
    ``"auto"`` takes the last component when ``b > 0`` and the first otherwise.
    """
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    if route == "auto":
        route = "final" if params.b > 0 else "first"
    if route == "final":
        series = _final_component_series(params, k_max)
    elif route == "first":
        series = _first_component_series(params, k_max)
    else:
        raise ValueError(f"unknown route {route!r}")
    return [(-1) ** k * math.factorial(k) * c for k, c in enumerate(series)]
