"""Metropolis sweep kernels: a numba version and a pure-numpy fallback.

Both take the same pre-generated uniforms, so for a fixed seed they walk the
same chain (up to the last-ulp differences between libm and numpy ``log``).
Set ``BJTRACE_DISABLE_NUMBA=1`` to force the numpy path.

Shapes: ``x`` is ``(chains, N)`` and is updated in place; ``steps`` and
``logu`` are ``(chains, sweeps, N)``.  ``steps`` holds uniforms in ``[0, 1)``
mapped to a proposal ``x + width * (2 u - 1)``, reflected back into
``(0, 1)``.  Each call returns the trace after every sweep, ``(chains, sweeps)``,
and the number of accepted moves per chain.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None

ENV_FLAG = "BJTRACE_DISABLE_NUMBA"


def numba_available() -> bool:
    return njit is not None


def default_backend() -> str:
    if os.environ.get(ENV_FLAG, "").strip() not in ("", "0") or not numba_available():
        return "numpy"
    return "numba"


def _reflect(y):
    if y < 0.0:
        return -y
    if y > 1.0:
        return 2.0 - y
    return y


def sweeps_numpy(x, steps, logu, a, b, beta, width):
    C, S, N = steps.shape
    traces = np.empty((C, S))
    accepted = np.zeros(C, dtype=np.int64)
    rows = np.arange(C)
    for s in range(S):
        for i in range(N):
            old = x[:, i]
            new = old + width * (2.0 * steps[:, s, i] - 1.0)
            new = np.where(new < 0.0, -new, new)
            new = np.where(new > 1.0, 2.0 - new, new)
            inside = (new > 0.0) & (new < 1.0)
            safe = np.where(inside, new, 0.5)
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = a * (np.log(safe) - np.log(old)) + b * (np.log1p(-safe) - np.log1p(-old))
                if beta != 0.0 and N > 1:
                    others = np.delete(x, i, axis=1)
                    ratio = ratio + beta * np.sum(
                        np.log(np.abs(safe[:, None] - others)) - np.log(np.abs(old[:, None] - others)),
                        axis=1)
            ok = inside & (logu[:, s, i] < ratio)
            x[rows[ok], i] = new[ok]
            accepted += ok
        traces[:, s] = x.sum(axis=1)
    return traces, accepted


def _sweeps_loop(x, steps, logu, a, b, beta, width):
    C, S, N = steps.shape
    traces = np.empty((C, S))
    accepted = np.zeros(C, dtype=np.int64)
    for c in range(C):
        for s in range(S):
            for i in range(N):
                old = x[c, i]
                new = _reflect(old + width * (2.0 * steps[c, s, i] - 1.0))
                if not (0.0 < new < 1.0):
                    continue
                ratio = a * (np.log(new) - np.log(old)) + b * (np.log1p(-new) - np.log1p(-old))
                if beta != 0.0:
                    clash = False
                    for j in range(N):
                        if j == i:
                            continue
                        dn = abs(new - x[c, j])
                        if dn == 0.0:
                            clash = True
                            break
                        ratio += beta * (np.log(dn) - np.log(abs(old - x[c, j])))
                    if clash:
                        continue
                if logu[c, s, i] < ratio:
                    x[c, i] = new
                    accepted[c] += 1
            tot = 0.0
            for i in range(N):
                tot += x[c, i]
            traces[c, s] = tot
    return traces, accepted


if njit is not None:
    _reflect = njit(cache=True)(_reflect)
    sweeps_numba = njit(cache=True)(_sweeps_loop)
else:  # pragma: no cover
    sweeps_numba = None


def run_sweeps(x, steps, logu, a, b, beta, width, backend: str | None = None):
    """Dispatch to the selected backend (``"numba"``, ``"numpy"`` or ``None`` for the default)."""
    backend = backend or default_backend()
    args = (x, np.ascontiguousarray(steps, dtype=np.float64), np.ascontiguousarray(logu, dtype=np.float64),
            float(a), float(b), float(beta), float(width))
    if backend == "numba":
        if sweeps_numba is None:
            raise RuntimeError("numba is not installed")
        return sweeps_numba(*args)
    if backend == "numpy":
        return sweeps_numpy(*args)
    raise ValueError(f"unknown backend {backend!r}")
