"""Compressed-sensing workbench for mixed symmetric random-graph matrices."""

__version__ = "0.1.0"

from .ensembles import (
    DistributionSpec,
    MeasurementMatrix,
    MixedGraphModel,
    bernoulli_from_graph,
    mixed_measurement,
    moment_check,
    named_law,
    sample_iid_matrix,
    sample_mixed_adjacency,
    sample_scalar,
    subsample_rows,
)
from .errors import (
    ExhaustiveGuardError,
    MixcsError,
    RankDeficientError,
    SingularIntervalError,
    ValidationError,
)
from .rip import (
    RipEstimate,
    SigmaInterval,
    delta_exhaustive,
    delta_monte_carlo,
    gram_asymptote_check,
    recovery_condition,
    sigma_feasible_all_cases,
    sigma_interval,
)
from .solver import RecoveryResult, basis_pursuit, bpdn, dual_certificate_check, lp_oracle
from .spectral import (
    SpectralEdgeReport,
    bai_yin_check,
    extreme_eigenvalues_symmetric,
    extreme_singular_values,
    semicircle_edge_check,
)
