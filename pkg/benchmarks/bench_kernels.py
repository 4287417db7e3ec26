"""Time the Metropolis sweep kernels: numba against the numpy fallback.

    python3 benchmarks/bench_kernels.py --n 5 --chains 4 --sweeps 2000
"""
import argparse
import time

import numpy as np

from bjtrace import _kernels


def bench(backend, N, chains, sweeps, repeats, a=3.0, b=1.0, beta=1.0, width=0.1):
    rng = np.random.default_rng(0)
    steps = rng.random((chains, sweeps, N))
    logu = np.log(rng.random((chains, sweeps, N)))
    best = np.inf
    out = None
    for _ in range(repeats):
        x = np.tile((np.arange(N) + 0.5) / N, (chains, 1))
        t0 = time.perf_counter()
        out = _kernels.run_sweeps(x, steps, logu, a, b, beta, width, backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--chains", type=int, default=4)
    ap.add_argument("--sweeps", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    if _kernels.numba_available():
        bench("numba", args.n, args.chains, 10, 1)  # compile
    moves = args.n * args.chains * args.sweeps
    results = {}
    for backend in ("numba", "numpy"):
        if backend == "numba" and not _kernels.numba_available():
            continue
        t, (traces, _) = bench(backend, args.n, args.chains, args.sweeps, args.repeats)
        results[backend] = traces
        print(f"{backend:6s} {t * 1e3:9.2f} ms  {moves / t / 1e6:8.2f} M moves/s")
    if len(results) == 2:
        same = np.array_equal(results["numba"], results["numpy"])
        print(f"identical traces: {same}")


if __name__ == "__main__":
    main()
