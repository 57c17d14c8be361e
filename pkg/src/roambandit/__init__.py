"""History-constrained contextual duelling bandit simulator.

A user repeatedly receives one recommendation per round and then compares it
against an item from their own consumption history; only the recommendation
incurs regret. The package provides the environment, the comparison choice
model, the likelihood-based estimator, the roam/colstim/random policies, an
experiment harness with seeded reproducible batches, and diagnostics for the
supporting theory.
"""

from .choice import (SIGMOID, LinkFunction, UserModel, sample_comparison,
                     sigmoid, sigmoid_deriv, validate_link, win_probability)
from .diagnostics import (TheoryConstants, check_concentration,
                          check_good_vector, check_lambda_min_condition,
                          check_rich_history, compute_alpha, compute_beta,
                          compute_kappa_sigmoid, scan_concentration_tau,
                          theory_constants)
from .env import (ContextSet, EnvConfig, best_arm, estimate_sigma,
                  sample_context_set, sample_theta_star, sample_unit_ball)
from .estimator import ConvergenceError, Dataset, MleConfig, score, solve_mle
from .harness import (METRICS, POLICIES, PRESET_NAMES, AggregateStats,
                      BatchResult, ConfigError, MetricBand, RunConfig,
                      Trajectory, aggregate, config_from_dict,
                      config_from_file, critical_ratio, derive_rng,
                      exploration_probes, exploration_state, moving_average,
                      preset, run_batch, run_single)
from .io import aggregates_equal, export, import_results
from .linalg import (DesignState, SingularDesignError, extreme_eigenvalues,
                     initialize_design, inverse_drift, min_eig_quadform_check,
                     rank_one_update, weighted_norm, weighted_norms_rows)
from .policy import (ColstimParams, PolicyState, StepDecision, colstim_step,
                     initial_state, random_policy_step, roam_explore_step,
                     roam_exploit_step, roam_update)

__version__ = "0.1.0"
