"""Simulation, variational approximation and estimation for the edge/two-star
network-formation model."""

__version__ = "0.1.0"

from ._validation import balanced_two_types, check_adjacency, check_marginals, check_types
from .errors import NonConvergenceError, ResourceLimitError, SeparationError
from .estimators import (
    EstimationResult,
    MeanFieldMLE,
    MonteCarloMLE,
    MPLEstimator,
    change_statistics,
    mc_mle,
    mf_mle,
    mple,
)
from .graphon import (
    BlockGraphon,
    TwoGroupSolution,
    block_bounds,
    euler_lagrange_residual,
    extreme_homophily_psi,
    phase_threshold,
    psi_beta_zero,
    two_group_solve,
    univariate_solver,
)
from .meanfield import (
    BoundReport,
    MFResult,
    mf_objective,
    mf_update_sweep,
    solve_mf,
    approximation_gap_bounds,
)
from .model import (
    BlockAlpha,
    FullAlpha,
    ModelParams,
    ParametricAlpha,
    SufficientStats,
    exact_psi,
    independent_links_psi,
    potential,
    potential_difference,
    sufficient_stats,
    utility,
)
from .sampler import (
    ChainConfig,
    StationaryOracle,
    UniformKernel,
    WeightedKernel,
    exact_stationary_distribution,
    glauber_step,
    sample_chain,
)
from .experiments import ExperimentConfig, PercentileTable, phase_diagram_sweep, run_experiment

__all__ = [
    "__version__",
    "BlockAlpha", "FullAlpha", "ParametricAlpha", "ModelParams", "SufficientStats",
    "potential", "potential_difference", "utility", "sufficient_stats",
    "exact_psi", "independent_links_psi",
    "UniformKernel", "WeightedKernel", "ChainConfig", "StationaryOracle",
    "glauber_step", "sample_chain", "exact_stationary_distribution",
    "MFResult", "BoundReport", "mf_objective", "mf_update_sweep", "solve_mf", "approximation_gap_bounds",
    "BlockGraphon", "TwoGroupSolution", "psi_beta_zero", "univariate_solver",
    "extreme_homophily_psi", "two_group_solve", "block_bounds",
    "euler_lagrange_residual", "phase_threshold",
    "EstimationResult", "change_statistics", "mple", "mf_mle", "mc_mle",
    "MPLEstimator", "MeanFieldMLE", "MonteCarloMLE",
    "ExperimentConfig", "PercentileTable", "run_experiment", "phase_diagram_sweep",
    "check_adjacency", "check_types", "check_marginals", "balanced_two_types",
    "ResourceLimitError", "SeparationError", "NonConvergenceError",
]
