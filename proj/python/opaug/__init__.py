"""Operator augmentation estimators, benchmarks and exact oracles."""

from ._opaug import (
    OpaugError,
    ensemble_shift,
    estimate_beta,
    exact_beta_ag,
    exact_beta_energy,
    exact_truncated_factor,
    noise_describe,
    oracle_case,
    poisson1d_matrix,
    poisson2d_matrix,
    run_benchmark,
    run_lemma_suites,
)

__all__ = [
    "OpaugError",
    "ensemble_shift",
    "estimate_beta",
    "exact_beta_ag",
    "exact_beta_energy",
    "exact_truncated_factor",
    "noise_describe",
    "oracle_case",
    "poisson1d_matrix",
    "poisson2d_matrix",
    "run_benchmark",
    "run_lemma_suites",
]
