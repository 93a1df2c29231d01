"""Block-encoded quantum Laplace transform.

Builds gate-level circuits that block-encode the discrete Laplace transform
matrix e^{x_i y_j}/N, certifies them with (alpha, a, eps) triples, and checks
them against dense classical oracles on small instances.

Modules
-------
numerics  tail bounds, truncation orders, Bessel and Chebyshev helpers
circuit   gate IR, metrics, state-vector simulation, QASM export
blockenc  block-encoding combinators and diagonal encodings
qlt       series planning, circuit synthesis, resource reports, verification
apps      Z-transform and continuous Laplace transform pipelines
cli       ``qlaplace`` command-line entry point
"""
from .apps import ContinuousProblem, LaplaceReport, dlt_matrix, prepare_laplace_state, success_probability
from .blockenc import BlockEncoding
from .numerics import SeriesKind, spectral_norm, truncation_order
from .qlt import (
    QltProblem,
    ResourceReport,
    as_problem,
    build_qlt,
    plan_series,
    random_problem,
    resource_report,
    verify_qlt,
)

__version__ = "0.1.0"

__all__ = [
    "BlockEncoding",
    "ContinuousProblem",
    "LaplaceReport",
    "QltProblem",
    "ResourceReport",
    "SeriesKind",
    "as_problem",
    "build_qlt",
    "dlt_matrix",
    "plan_series",
    "prepare_laplace_state",
    "random_problem",
    "resource_report",
    "spectral_norm",
    "success_probability",
    "truncation_order",
    "verify_qlt",
]
