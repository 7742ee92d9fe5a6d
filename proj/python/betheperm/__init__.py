"""Permanent estimation by Bethe free-energy minimization.

Belief propagation on the bipartite matching model gives a fast
approximation of the matrix permanent; exact oracles, a Monte Carlo
baseline and permanent kernels between point sets round it out.
"""

from betheperm._core import (
    BetheResult,
    BPConfig,
    DomainError,
    GramReport,
    LogValue,
    MessageInit,
    NumericError,
    ParseError,
    SampleEstimate,
    ShapeError,
    SizeError,
    ZeroEntryPolicy,
    belief_matrix,
    brute_force_permanent,
    determinant,
    estimate_permanent,
    gram_psd_check,
    kendall_distance,
    permanent_kernel,
    random_matrix,
    rbf_subkernel_matrix,
    ryser_permanent,
    sample_permanent,
    scaled_diagonal,
    sinkhorn_scale,
)

__all__ = [
    "BPConfig",
    "BetheResult",
    "DomainError",
    "GramReport",
    "LogValue",
    "MessageInit",
    "NumericError",
    "ParseError",
    "SampleEstimate",
    "ShapeError",
    "SizeError",
    "ZeroEntryPolicy",
    "belief_matrix",
    "brute_force_permanent",
    "determinant",
    "estimate_permanent",
    "gram_psd_check",
    "kendall_distance",
    "permanent_kernel",
    "random_matrix",
    "rbf_subkernel_matrix",
    "ryser_permanent",
    "sample_permanent",
    "scaled_diagonal",
    "sinkhorn_scale",
]

__version__ = "0.1.0"
