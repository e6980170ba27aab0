"""Lazy reversible Markov chain Monte Carlo with explicit error bounds.

The package has two halves that check each other. The generative half runs
the lazy Metropolis ball walk on the d-dimensional unit ball for densities
with a declared log-Lipschitz constant, with tuned step radius, burn-in, and
cost planned from closed-form conductance and error bounds. The exact half
re-states every bound on finite chains, where conductance, mixing, operator
positivity, and the mean-square error of the burn-in average are computable
exactly from the transition matrix, and verifies the inequalities with zero
statistical slack.
"""

from .bounds import (
    BallWalkPlan,
    BoundReport,
    ConductanceValue,
    ball_plan,
    ball_walk_burn_in,
    ball_walk_conductance_lower,
    ball_walk_sample_size,
    burn_in,
    cheeger_bound,
    conductance_exact,
    cost,
    error_bound,
    lazification_conductance,
    mixing_bound,
    mixing_bound_exp,
    stationary_error_bound,
)
from .chain import (
    DiscreteKernel,
    ProbabilityVector,
    StateFunction,
    apply_operator,
    chain_from_json,
    chain_to_json,
    check_operator_psd,
    check_reversibility,
    check_stationarity,
    density_bound,
    lazify,
    load_chain,
    n_step,
    random_reversible_pair,
    save_chain,
)
from .densities import (
    DensityOracle,
    Integrand,
    explin_density,
    gauss_density,
    parse_density,
    parse_integrand,
    uniform_density,
    verify_density_class,
)
from .estimator import (
    ChainRun,
    MseReport,
    ReferenceValue,
    empirical_mse,
    exact_mse_discrete,
    exact_mse_grid,
    mse_decomposition_rhs,
    reference_integral,
    run_chain,
    run_replications,
    simulate_discrete_estimator,
    stationary_mse_curve,
    summarize_replications,
)
from .walk import (
    ChainState,
    StepCounters,
    WalkConfig,
    ball_walk_propose,
    build_metropolis_kernel,
    delta_choice,
    lazy_metro_step,
    metro_step,
    uniform_ball_sample,
)

__version__ = "0.1.0"

__all__ = [
    "BallWalkPlan",
    "BoundReport",
    "ChainRun",
    "ChainState",
    "ConductanceValue",
    "DensityOracle",
    "DiscreteKernel",
    "Integrand",
    "MseReport",
    "ProbabilityVector",
    "ReferenceValue",
    "StateFunction",
    "StepCounters",
    "WalkConfig",
    "apply_operator",
    "ball_plan",
    "ball_walk_burn_in",
    "ball_walk_conductance_lower",
    "ball_walk_propose",
    "ball_walk_sample_size",
    "build_metropolis_kernel",
    "burn_in",
    "chain_from_json",
    "chain_to_json",
    "cheeger_bound",
    "check_operator_psd",
    "check_reversibility",
    "check_stationarity",
    "conductance_exact",
    "cost",
    "delta_choice",
    "density_bound",
    "empirical_mse",
    "error_bound",
    "exact_mse_discrete",
    "exact_mse_grid",
    "explin_density",
    "gauss_density",
    "lazification_conductance",
    "lazify",
    "lazy_metro_step",
    "load_chain",
    "metro_step",
    "mixing_bound",
    "mixing_bound_exp",
    "mse_decomposition_rhs",
    "n_step",
    "parse_density",
    "parse_integrand",
    "random_reversible_pair",
    "reference_integral",
    "run_chain",
    "run_replications",
    "save_chain",
    "simulate_discrete_estimator",
    "stationary_error_bound",
    "stationary_mse_curve",
    "summarize_replications",
    "uniform_ball_sample",
    "uniform_density",
    "verify_density_class",
]
