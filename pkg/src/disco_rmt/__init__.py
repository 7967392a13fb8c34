"""Disco block ensembles built from palindromic Toeplitz and Wigner matrices.

Submodules: :mod:`matrix_core` (symmetric storage, traces, eigenvalues),
:mod:`ensembles` (seeded generators), :mod:`disco` (block construction and
its identities), :mod:`limit_moments` (exact pair-partition moments) and
:mod:`experiments` (Monte-Carlo runs, artifacts).
"""
from .disco import (
    DiscoParams,
    build_disco,
    degrees_of_freedom,
    disco_eigenvalues,
    disco_trace_split,
    normalized_disco_moment,
    split_spectrum,
)
from .ensembles import EnsembleSpec, RngStream, counterexample_matrices, parse_ensemble, sample
from .limit_moments import (
    PairPartition,
    catalan,
    constrained_moment,
    gaussian_moment,
    height,
    height_moment,
    limit_moment_disco,
    moment_bounds,
)
from .matrix_core import SymmetricMatrix, add, eigenvalues_sym, scale, subtract, trace_power

__version__ = "0.1.0"
