"""Command-line front end.

    python3 -m bjtrace moments --n 3 --a 0 --b 0 --beta 1 --k 2
    python3 -m bjtrace pdf --n 3 --a 0 --b 0 --beta 1 --grid 301 --format csv

Exit codes: 0 success, 2 invalid parameters or usage, 3 unsupported regime.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .core import ParameterError, RegimeError, format_rational, to_rational, validate_params
from .laplace import hhat_series, moments
from .montecarlo import ChainConfig, InsufficientSamples, compare, sample_traces
from .tracedist import OutOfSupportError, StepRejectedError, assemble_pdf, pdf_eval_grid

EXIT_OK, EXIT_USAGE, EXIT_REGIME = 0, 2, 3


def _rational(text: str):
    try:
        return to_rational(text)
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bjtrace",
                                     description="Distribution of the trace of the beta-Jacobi ensemble.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, required=True, help="matrix size N >= 1")
    common.add_argument("--a", type=_rational, required=True,
                        help='exponent of x, "num/den" or decimal, > -1 (negative fractions as --a=-1/2)')
    common.add_argument("--b", type=_rational, required=True, help="exponent of (1-x), > -1")
    common.add_argument("--beta", type=_rational, required=True, help="Dyson index, >= 0")
    common.add_argument("--format", choices=("json", "csv"), default=None,
                        help="output format (default: csv for pdf, json otherwise)")
    common.add_argument("--out", default=None, help="write to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("moments", parents=[common], help="exact moments m_0..m_k of the trace")
    p.add_argument("--k", type=int, default=4, help="highest moment (default 4)")

    p = sub.add_parser("series", parents=[common],
                       help="Taylor coefficients c_{p,l} of the Laplace-side vector (needs b > 0)")
    p.add_argument("--order", type=int, default=12, help="highest power (default 12)")

    p = sub.add_parser("pdf", parents=[common], help="density of the trace on an even grid over [0, N]")
    p.add_argument("--grid", type=_positive_int, default=101, help="number of grid points (default 101)")
    p.add_argument("--experimental-continuation", action="store_true",
                   help="allow the experimental continuation when a is not a nonnegative integer")

    sub.add_parser("pieces", parents=[common], help="exact piecewise representation of the density")

    p = sub.add_parser("validate", parents=[common], help="Monte Carlo check against the exact density")
    p.add_argument("--samples", type=_positive_int, default=100_000, help="number of traces (default 100000)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--bins", type=_positive_int, default=30, help="histogram bins (default 30)")
    return parser


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _g17(x) -> str:
    return f"{float(x):.17g}"


def _render(args, params) -> str:
    fmt = args.format or ("csv" if args.command == "pdf" else "json")
    if args.command == "moments":
        if args.k < 0:
            raise ParameterError("bad_k", "--k must be >= 0")
        ms = [format_rational(m) for m in moments(params, args.k)]
        if fmt == "csv":
            return _csv(["k", "moment"], enumerate(ms))
        return json.dumps({"params": params.as_json(), "moments": ms}) + "\n"
    if args.command == "series":
        if args.order < 0:
            raise ParameterError("bad_order", "--order must be >= 0")
        table = hhat_series(params, args.order)
        if fmt == "csv":
            return _csv(["p", "l", "c"], ((p, l, format_rational(c))
                                          for p, row in enumerate(table.c) for l, c in enumerate(row)))
        return json.dumps(table.to_json()) + "\n"
    if args.command == "pieces":
        doc = assemble_pdf(params).to_json()
        if fmt == "csv":
            return _csv(["p", "gamma", "weight", "power", "coeff"],
                        ((pc["p"], pc["gamma"], pc["weight"], k, c)
                         for pc in doc["pieces"] for k, c in enumerate(pc["coeffs"])))
        return json.dumps(doc) + "\n"
    if args.command == "pdf":
        pdf = assemble_pdf(params)
        ts = np.linspace(0.0, params.N, args.grid) if args.grid > 1 else np.array([0.0])
        vals = pdf_eval_grid(pdf, ts, continuation=args.experimental_continuation)
        if fmt == "csv":
            return _csv(["t", "pdf"], ((_g17(t), _g17(v)) for t, v in zip(ts, vals)))
        return json.dumps({"params": params.as_json(), "t": [float(t) for t in ts],
                           "pdf": [float(v) for v in vals]}) + "\n"
    if args.command == "validate":
        pdf = assemble_pdf(params)
        if not pdf.polynomial:
            raise RegimeError("validate needs a nonnegative integer a (exact density)")
        samples = sample_traces(params, ChainConfig(n_samples=args.samples, seed=args.seed))
        report = compare(samples, pdf, bins=args.bins)
        if fmt == "csv":
            return report.histogram_csv()
        doc = {"params": params.as_json(), **report.to_json(), "passed": report.passed()}
        return json.dumps(doc) + "\n"
    raise AssertionError(args.command)


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        params = validate_params(args.n, args.a, args.b, args.beta)
        text = _render(args, params)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientSamples as exc:
        print(f"error: insufficient_samples: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (RegimeError, OutOfSupportError, StepRejectedError) as exc:
        print(f"error: unsupported_regime: {exc}", file=sys.stderr)
        return EXIT_REGIME
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
