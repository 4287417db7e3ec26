"""Metropolis sampling of the eigenvalue density and comparison with exact results.

The chain targets ``prod x^a (1-x)^b prod_{j<k} |x_j - x_k|^beta`` on
``(0, 1)^N`` directly, one coordinate at a time, with reflected uniform
proposals.  Traces are recorded once every ``thinning`` full sweeps.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .core import EnsembleParams
from .laplace import moments as exact_moments
from .tracedist import PiecewisePDF, pdf_eval_grid

N_BATCHES = 100
BLOCK_SWEEPS = 4096


class InsufficientSamples(ValueError):
    pass


@dataclass(frozen=True)
class ChainConfig:
    n_samples: int = 100_000
    burn_in: int = 10_000
    thinning: int = 5
    proposal_width: float = 0.1
    seed: int = 0
    n_chains: int = 4

    def __post_init__(self):
        for name in ("n_samples", "burn_in", "thinning", "n_chains"):
            val = getattr(self, name)
            if isinstance(val, bool) or int(val) != val or val < (0 if name == "burn_in" else 1):
                raise ValueError(f"{name} must be a positive integer, got {val!r}")
        if not 0 < self.proposal_width <= 1:
            raise ValueError(f"proposal_width must lie in (0, 1], got {self.proposal_width}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class TraceSamples:
    values: np.ndarray
    config: ChainConfig
    params: EnsembleParams
    acceptance: float = float("nan")
    chain_length: int = 0  # samples per chain; values are chain-major

    def __len__(self):
        return len(self.values)


# ---------------------------------------------------------------------------
# target density


def log_density(x, a, b, beta) -> float:
    """Unnormalised log density of an eigenvalue configuration (``-inf`` off the support)."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0) or np.any(x >= 1):
        return -math.inf
    a, b, beta = float(a), float(b), float(beta)
    out = a * np.sum(np.log(x)) + b * np.sum(np.log1p(-x))
    if beta and len(x) > 1:
        diff = np.abs(x[:, None] - x[None, :])[np.triu_indices(len(x), 1)]
        if np.any(diff == 0):
            return -math.inf
        out += beta * np.sum(np.log(diff))
    return float(out)


def log_accept_ratio(x, i: int, new: float, a, b, beta) -> float:
    """``log pi(x') - log pi(x)`` for ``x'`` equal to ``x`` with coordinate ``i`` moved to ``new``."""
    y = np.array(x, dtype=float)
    y[i] = new
    return log_density(y, a, b, beta) - log_density(x, a, b, beta)


def proposal_density(old: float, new: float, width: float) -> float:
    """Density of the reflected uniform proposal; symmetric in ``old`` and ``new``."""
    total = 0.0
    for image in (new, -new, 2.0 - new):
        if abs(image - old) <= width:
            total += 1.0 / (2.0 * width)
    return total


def _initial_state(N: int, chains: int) -> np.ndarray:
    return np.tile((np.arange(N) + 0.5) / N, (chains, 1))


def sample_traces(params: EnsembleParams, config: ChainConfig = ChainConfig(),
                  backend: Optional[str] = None) -> TraceSamples:
    """Run ``config.n_chains`` independent chains and collect thinned traces.

    Chain ``c`` draws from ``SeedSequence(config.seed).spawn(n_chains)[c]``;
    samples are split as evenly as possible and concatenated in chain order.
    """
    N = params.N
    a, b, beta = float(params.a), float(params.b), float(params.beta)
    C = config.n_chains
    per_chain = [config.n_samples // C + (1 if c < config.n_samples % C else 0) for c in range(C)]
    need = max(per_chain)
    total_sweeps = config.burn_in + need * config.thinning
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(C)]
    x = _initial_state(N, C)
    kept = np.empty((C, need))
    filled = 0
    done = 0
    accepted = np.zeros(C, dtype=np.int64)
    while done < total_sweeps:
        S = min(BLOCK_SWEEPS, total_sweeps - done)
        steps = np.stack([r.random((S, N)) for r in rngs])
        logu = np.log(np.stack([r.random((S, N)) for r in rngs]))
        traces, acc = _kernels.run_sweeps(x, steps, logu, a, b, beta, config.proposal_width, backend)
        accepted += acc
        idx = np.arange(done, done + S)
        take = (idx >= config.burn_in) & ((idx - config.burn_in + 1) % config.thinning == 0)
        got = traces[:, take]
        kept[:, filled:filled + got.shape[1]] = got
        filled += got.shape[1]
        done += S
    values = np.concatenate([kept[c, :per_chain[c]] for c in range(C)])
    rate = float(accepted.sum()) / (C * total_sweeps * N)
    return TraceSamples(values, config, params, rate, need)


# ---------------------------------------------------------------------------
# exact references


def exact_samples(pdf: PiecewisePDF, n: int, seed: int = 0) -> np.ndarray:
    """Independent draws by inverting the exact CDF (polynomial mode)."""
    pw = pdf.piecewise
    u = np.random.default_rng(seed).random(n)
    lo = np.zeros(n)
    hi = np.full(n, float(pdf.params.N))
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = pw.cdf_float(mid) < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _bin_masses(pdf: PiecewisePDF, edges: np.ndarray, continuation: bool) -> np.ndarray:
    if pdf.polynomial:
        return np.diff(pdf.piecewise.cdf_float(edges))
    nodes, weights = np.polynomial.legendre.leggauss(20)
    out = np.empty(len(edges) - 1)
    for j, (lo, hi) in enumerate(zip(edges[:-1], edges[1:])):
        pts = lo + (hi - lo) * (nodes + 1) / 2
        out[j] = (hi - lo) / 2 * np.dot(weights, pdf_eval_grid(pdf, pts, continuation=continuation))
    return out


def _exact_cdf(pdf: PiecewisePDF, t: np.ndarray, continuation: bool) -> np.ndarray:
    if pdf.polynomial:
        return pdf.piecewise.cdf_float(t)
    grid = np.linspace(0.0, pdf.params.N, 40 * pdf.params.N + 1)
    cum = np.concatenate([[0.0], np.cumsum(_bin_masses(pdf, grid, continuation))])
    return np.interp(t, grid, cum)  # piecewise-linear between fine quadrature nodes


def ks_distance(values: np.ndarray, cdf: np.ndarray) -> float:
    """Kolmogorov-Smirnov distance given sorted samples and the exact CDF at them."""
    n = len(values)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


def batch_means_se(x: np.ndarray, n_batches: int = N_BATCHES) -> float:
    m = len(x) // n_batches
    if m < 1:
        raise InsufficientSamples(f"need at least {n_batches} samples for batch means")
    means = x[: m * n_batches].reshape(n_batches, m).mean(axis=1)
    return float(np.std(means, ddof=1) / math.sqrt(n_batches))


@dataclass
class ComparisonReport:
    n: int
    edges: np.ndarray
    observed: np.ndarray
    expected_mass: np.ndarray
    chi2: float
    dof: int
    ks: float
    moments: list  # (k, empirical, exact, se, z)
    ess: float
    acceptance: float = float("nan")
    exact_density_centres: np.ndarray = field(default=None, repr=False)

    @property
    def max_abs_z(self) -> float:
        return max(abs(m[4]) for m in self.moments)

    def passed(self, ks_tol: float = 0.015, z_tol: float = 4.0) -> bool:
        return self.ks < ks_tol and self.max_abs_z < z_tol

    def to_json(self) -> dict:
        return {
            "n": self.n, "ks": self.ks, "chi2": self.chi2, "dof": self.dof, "ess": self.ess,
            "acceptance": self.acceptance,
            "moments": [{"k": k, "empirical": e, "exact": x, "se": s, "z": z}
                        for k, e, x, s, z in self.moments],
            "bins": [{"lo": float(lo), "hi": float(hi), "observed": int(o), "expected": float(m * self.n)}
                     for lo, hi, o, m in zip(self.edges[:-1], self.edges[1:], self.observed,
                                              self.expected_mass)],
        }

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["bin_center", "density", "exact_density"])
        widths = np.diff(self.edges)
        centres = 0.5 * (self.edges[:-1] + self.edges[1:])
        dens = self.observed / (self.n * widths)
        for c, d, e in zip(centres, dens, self.exact_density_centres):
            w.writerow([f"{c:.17g}", f"{d:.17g}", f"{e:.17g}"])
        return buf.getvalue()


def compare(samples: TraceSamples, pdf: PiecewisePDF, bins: int = 30,
            continuation: bool = False, k_max: int = 4) -> ComparisonReport:
    """Histogram, chi-square, KS distance and moment z-scores against the exact law."""
    v = np.asarray(samples.values, dtype=float)
    n = len(v)
    if n < N_BATCHES:
        raise InsufficientSamples(f"{n} samples is fewer than {N_BATCHES}")
    N = pdf.params.N
    powers = [v ** k for k in range(1, k_max + 1)]
    se1 = batch_means_se(powers[0])
    ess = float(np.var(powers[0], ddof=1) / se1 ** 2) if se1 > 0 else float(n)
    if ess < 100:
        raise InsufficientSamples(f"effective sample size {ess:.1f} < 100")

    edges = np.linspace(0.0, N, bins + 1)
    observed, _ = np.histogram(v, bins=edges)
    mass = _bin_masses(pdf, edges, continuation)
    expected = mass * n
    pos = expected > 0
    chi2 = float(np.sum((observed[pos] - expected[pos]) ** 2 / expected[pos]))

    srt = np.sort(v)
    ks = ks_distance(srt, _exact_cdf(pdf, srt, continuation))

    exact = exact_moments(pdf.params, k_max)
    rows = []
    for k, pk in enumerate(powers, start=1):
        emp = float(pk.mean())
        se = batch_means_se(pk)
        ex = float(exact[k])
        rows.append((k, emp, ex, se, (emp - ex) / se if se > 0 else math.inf))
    centres = 0.5 * (edges[:-1] + edges[1:])
    dens = pdf_eval_grid(pdf, centres, continuation=continuation)
    return ComparisonReport(n, edges, observed, mass, chi2, int(pos.sum()) - 1, ks, rows, ess,
                            samples.acceptance, dens)
