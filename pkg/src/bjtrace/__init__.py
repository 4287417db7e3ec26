"""Exact distribution of the trace of the beta-Jacobi ensemble."""
from .core import EnsembleParams, ParameterError, RegimeError, validate_params
from .laplace import hhat_series, moments
from .montecarlo import ChainConfig, compare, sample_traces
from .tracedist import assemble_pdf, pdf_cdf, pdf_eval, pdf_eval_grid, pdf_moment

__all__ = [
    "EnsembleParams", "ParameterError", "RegimeError", "validate_params",
    "hhat_series", "moments", "ChainConfig", "compare", "sample_traces",
    "assemble_pdf", "pdf_cdf", "pdf_eval", "pdf_eval_grid", "pdf_moment",
]
__version__ = "0.1.0"
