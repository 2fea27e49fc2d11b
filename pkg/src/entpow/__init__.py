"""Entropy-power analytics for finite-alphabet signals observed in
white Gaussian noise.

The observation law is an exact Gaussian mixture; entropy, entropy
power, and mutual information and their derivatives in the
per-component signal powers are computed from conditional-MMSE moment
expectations. Concavity in those powers is certified by eigenvalue
checks, probed empirically along scaling paths, and exploited for
power allocation under a total budget.
"""

from .constellation import (
    ChannelModel,
    Constellation,
    GaussianMixture,
    MatrixScaling,
    ScalingVector,
    ValidationError,
    diagonal_model,
    dump_constellation,
    load_constellation,
    log_density_hessian,
    matrix_model,
    mixture_log_density,
    sample_outputs,
    score,
    validate_constellation,
)
from .integrate import IntegratorConfig, MomentEstimates, mixture_entropy, mixture_moments
from .mmse import ConditionalMoments, MmseSummary, conditional_moments, mmse_matrix, posterior_responsibilities
from .analytics import (
    CheckResult,
    EntropyReport,
    HessianReport,
    ReciprocalView,
    chain_rule_assembly_check,
    de_bruijn_check,
    differential_entropy,
    entropy_gradient,
    entropy_hessian,
    entropy_power_hessian,
    entropy_power_of,
    gaussian_entropy,
    hessian_gamma_check,
    lambda_sweep,
    reciprocal_identity_check,
    reciprocal_view,
    score_identity_check,
)
from .allocate import AllocationResult, optimize_power_allocation, project_to_budget
from .probes import (
    SegmentProbe,
    probe_diagonal_segment,
    probe_matrix_segment,
    probe_scalar_costa,
    search_matrix_counterexample,
    second_difference_scan,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .kernels import available_backends

__version__ = "0.1.0"

__all__ = [
    "AllocationResult",
    "ChannelModel",
    "CheckResult",
    "ConditionalMoments",
    "Constellation",
    "EntropyReport",
    "GaussianMixture",
    "HessianReport",
    "IntegratorConfig",
    "KERNEL_BACKEND",
    "MatrixScaling",
    "MmseSummary",
    "MomentEstimates",
    "ReciprocalView",
    "ScalingVector",
    "SegmentProbe",
    "ValidationError",
    "available_backends",
    "chain_rule_assembly_check",
    "conditional_moments",
    "de_bruijn_check",
    "diagonal_model",
    "differential_entropy",
    "dump_constellation",
    "entropy_gradient",
    "entropy_hessian",
    "entropy_power_hessian",
    "entropy_power_of",
    "gaussian_entropy",
    "hessian_gamma_check",
    "lambda_sweep",
    "load_constellation",
    "log_density_hessian",
    "matrix_model",
    "mixture_entropy",
    "mixture_log_density",
    "mixture_moments",
    "mmse_matrix",
    "optimize_power_allocation",
    "posterior_responsibilities",
    "probe_diagonal_segment",
    "probe_matrix_segment",
    "probe_scalar_costa",
    "project_to_budget",
    "reciprocal_identity_check",
    "reciprocal_view",
    "sample_outputs",
    "score",
    "score_identity_check",
    "search_matrix_counterexample",
    "second_difference_scan",
    "validate_constellation",
]
