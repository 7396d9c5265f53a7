"""Solvers, oracles, simulator, and benchmarks for the service-migration MDP.

The library models a service that follows a randomly moving user across
edge hosts: stay put and pay transmission cost while the user is away, or
migrate and pay the move. It provides exact evaluation and search of
double-threshold policies, value/policy-iteration baselines, brute-force
oracles, a seeded Monte-Carlo simulator, and a benchmark harness. An HTTP
service (``migmdp.service``) and a thin CLI client (``migmdp.cli``) wrap
the same functions.
"""

from .baselines import (
    SolverReport,
    always_migrate_policy,
    evaluate_fixed_policy,
    never_migrate_policy,
    policy_iteration,
    value_iteration,
)
from .bench import (
    CSV_COLUMNS,
    SOLVER_NAMES,
    SUMMARY_COLUMNS,
    ExperimentConfig,
    SolverOutcome,
    SummaryRow,
    SweepRecord,
    emit_results,
    flatten_records,
    random_instance,
    run_beta_sweep,
    run_compare,
    summary_to_rows,
    write_result_rows,
    write_summary_rows,
)
from .linalg import SingularMatrixError, solve_dense
from .mdp import (
    Action,
    MigrationMdp,
    MoveDistribution,
    bellman_backup,
    movement_distribution,
    one_slot_cost,
    validate_policy,
)
from .oracle import (
    exhaustive_threshold_search,
    extended_action_value_iteration,
    is_threshold_policy,
)
from .simulate import (
    RngStream,
    Trajectory,
    monte_carlo_value,
    sample_trajectory,
    truncation_horizon,
)
from .thresholds import (
    ThresholdPair,
    ThresholdSolveResult,
    build_policy_system,
    evaluate_thresholds,
    find_optimal_thresholds,
    threshold_policy,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "CSV_COLUMNS",
    "ExperimentConfig",
    "MigrationMdp",
    "MoveDistribution",
    "RngStream",
    "SOLVER_NAMES",
    "SUMMARY_COLUMNS",
    "SingularMatrixError",
    "SolverOutcome",
    "SolverReport",
    "SummaryRow",
    "SweepRecord",
    "ThresholdPair",
    "ThresholdSolveResult",
    "Trajectory",
    "always_migrate_policy",
    "bellman_backup",
    "build_policy_system",
    "emit_results",
    "evaluate_fixed_policy",
    "evaluate_thresholds",
    "exhaustive_threshold_search",
    "extended_action_value_iteration",
    "find_optimal_thresholds",
    "flatten_records",
    "is_threshold_policy",
    "monte_carlo_value",
    "movement_distribution",
    "never_migrate_policy",
    "one_slot_cost",
    "policy_iteration",
    "random_instance",
    "run_beta_sweep",
    "run_compare",
    "sample_trajectory",
    "solve_dense",
    "summary_to_rows",
    "threshold_policy",
    "truncation_horizon",
    "validate_policy",
    "value_iteration",
    "write_result_rows",
    "write_summary_rows",
]
