"""Closed-form normalisation constants of the beta-Jacobi trace problem.

All functions return a :class:`~bjtrace.core.GammaProduct` for exact
arguments and a ``float`` as soon as one argument is a float.
"""
from __future__ import annotations

from .core import ONE, as_scalar, gamma


def selberg(N: int, a, b, beta):
    """Selberg integral ``S_N(a, b, beta)`` as a product of Gamma functions."""
    a, b, beta = as_scalar(a), as_scalar(b), as_scalar(beta)
    half = beta / 2
    out = ONE
    for j in range(N):
        out = out * gamma(a + 1 + j * half) * gamma(b + 1 + j * half) * gamma(1 + (j + 1) * half)
        out = out / (gamma(a + b + 2 + (N + j - 1) * half) * gamma(1 + half))
    return out


def laguerre_w(a, beta, n: int):
    """``W_{a,beta,n}``, the Laguerre-weight normalisation (also ``L_n(a, beta)``).

    ``n = 0`` gives the empty product 1.
    """
    a, beta = as_scalar(a), as_scalar(beta)
    half = beta / 2
    out = ONE
    for j in range(n):
        out = out * gamma(a + 1 + j * half) * gamma(1 + (j + 1) * half) / gamma(1 + half)
    return out


def fixed_trace_f(N: int, a, beta):
    """Normalisation ``F_N(a, beta)`` of the fixed-trace Laguerre ensemble."""
    a, beta = as_scalar(a), as_scalar(beta)
    return laguerre_w(a, beta, N) / gamma((a + 1) * N + beta * N * (N - 1) / 2)


def eta(N: int, a, b, p: int, beta):
    """Total homogeneity degree of the two-block integrand of ``K_N``."""
    a, b, beta = as_scalar(a), as_scalar(b), as_scalar(beta)
    q = N - p
    return (b + 1) * p + beta * p * (p - 1) / 2 + (a + 1) * q + beta * q * (q - 1) / 2


def k_norm(N: int, a, b, p: int, beta):
    """Two-block constant ``K_N(a, b, p, beta)`` (``p`` variables of weight ``x^b``)."""
    if not 0 <= p <= N:
        raise ValueError(f"p must lie in [0, {N}], got {p}")
    return laguerre_w(b, beta, p) * laguerre_w(a, beta, N - p) / gamma(eta(N, a, b, p, beta))


def beta_function(a, b):
    """Euler beta ``B(a+1, b+1)``; equals ``selberg(1, a, b, beta)``."""
    a, b = as_scalar(a), as_scalar(b)
    return gamma(a + 1) * gamma(b + 1) / gamma(a + b + 2)

