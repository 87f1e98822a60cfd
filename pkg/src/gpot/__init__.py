"""Wasserstein distances and Sinkhorn divergences between Gaussian processes,
estimated from Gram matrices and from finite samples."""

from .bounds import BOUND_IDS, BoundQuery, bound_value
from .divergences import (
    DivergenceReport,
    EntropicParams,
    GaussianParams,
    divergence_report,
    entropic_ot,
    g_func,
    hs_distance_sq,
    hs_norm_sq_estimate,
    optimal_plan_cross_cov,
    sinkhorn,
    sinkhorn_continuity_bound,
    sinkhorn_via_rkhs_representation,
    trace_norm,
    w2_squared,
)
from .errors import *  # noqa: F401,F403
from .experiments import (
    ExperimentConfig,
    ResultRow,
    loglog_slope,
    run_experiment,
    run_gram_sweep,
    run_sample_sweep,
)
from .kernels import GramMatrix, KernelSpec, cross_gram, gram, kernel_eval, kernel_sup_bound, rkhs_dim
from .linalg import (
    PsdPolicy,
    Spectrum,
    SymMatrix,
    cross_spectrum,
    eig_sym,
    entropic_map_spectrum,
    psd_project,
    psd_sqrt,
)
from .simulation import (
    EmpiricalCov,
    PathSample,
    PointSample,
    empirical_cov,
    estimate_from_samples,
    sample_paths,
    sample_points,
)

__version__ = "0.1.0"
