"""Robust sparse recovery via rank-based residual scoring.

Solvers: NPSR (rank pseudo norm + l1, coordinate steepest descent), OMP,
and Lasso/ISTA, plus synthetic problem generators and a benchmark harness
that sweeps noise levels and writes trial-level CSV results.
"""

from .baselines import LassoConfig, OmpConfig, lasso_ista, omp
from .model import (
    Dictionary,
    NoiseModel,
    ProblemInstance,
    SparseSignal,
    gen_dictionary,
    gen_signal,
    make_instance,
    reconstruction_error,
    sample_noise,
    snr,
    snr_db,
)
from .scores import ScoreFunction, rank_pseudo_norm, ranks_midrank, score_vector
from .solver import (
    NpsrConfig,
    NumericalError,
    SolveResult,
    descent_vector,
    exact_line_search,
    l1_subgradient,
    objective,
    score_of_residual,
    select_direction,
    solve,
)

__all__ = [
    "Dictionary",
    "LassoConfig",
    "NoiseModel",
    "NpsrConfig",
    "NumericalError",
    "OmpConfig",
    "ProblemInstance",
    "ScoreFunction",
    "SolveResult",
    "SparseSignal",
    "descent_vector",
    "exact_line_search",
    "gen_dictionary",
    "gen_signal",
    "l1_subgradient",
    "lasso_ista",
    "make_instance",
    "objective",
    "omp",
    "rank_pseudo_norm",
    "ranks_midrank",
    "reconstruction_error",
    "sample_noise",
    "score_of_residual",
    "score_vector",
    "select_direction",
    "snr",
    "snr_db",
    "solve",
]

__version__ = "0.1.0"
