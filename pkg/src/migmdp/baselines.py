"""Reference solvers: value iteration, policy iteration, fixed policies.

These are the standard dynamic-programming baselines the threshold search
is benchmarked against, plus exact evaluation of arbitrary stationary
policies (used both by policy iteration and as ground truth for the
never-migrate and always-migrate reference policies).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import solve_dense
from .mdp import Action, MigrationMdp, bellman_backup, validate_policy

__all__ = [
    "SolverReport",
    "always_migrate_policy",
    "evaluate_fixed_policy",
    "never_migrate_policy",
    "policy_iteration",
    "value_iteration",
]


@dataclass(frozen=True)
class SolverReport:
    """Solver output plus work counters.

    ``iterations`` counts backup sweeps for value iteration and
    evaluate-improve rounds for policy iteration. ``linear_solves`` counts
    exact policy evaluations (0 for value iteration).
    """

    values: np.ndarray
    policy: np.ndarray
    iterations: int
    linear_solves: int


def never_migrate_policy(mdp: MigrationMdp) -> np.ndarray:
    """Migrate only where forced, at the two boundary offsets."""
    policy = np.full(mdp.n_states, int(Action.NO_MIGRATE), dtype=np.int64)
    policy[0] = policy[-1] = int(Action.MIGRATE)
    return policy


def always_migrate_policy(mdp: MigrationMdp) -> np.ndarray:
    """Migrate at every offset except 0, where the service is co-located."""
    policy = np.full(mdp.n_states, int(Action.MIGRATE), dtype=np.int64)
    policy[-mdp.min_offset] = int(Action.NO_MIGRATE)
    return policy


def evaluate_fixed_policy(mdp: MigrationMdp, policy: np.ndarray) -> np.ndarray:
    """Exact discounted cost of a stationary policy at every offset.

    Builds the policy's one-step transition matrix row by row (migrating
    rows land at 0 before the move, keeping rows move from the current
    offset), then solves ``(I - gamma * P) v = c`` in one dense solve.
    """
    policy = validate_policy(mdp, policy)
    n = mdp.n_states
    i0 = -mdp.min_offset
    stay = 1.0 - mdp.p - mdp.q

    transitions = np.zeros((n, n))
    costs = np.empty(n)
    for i, s in enumerate(range(mdp.min_offset, mdp.max_offset + 1)):
        if policy[i] == Action.MIGRATE:
            costs[i] = 0.0 if s == 0 else 1.0
            transitions[i, i0 - 1] = mdp.q
            transitions[i, i0] = stay
            transitions[i, i0 + 1] = mdp.p
        else:
            costs[i] = 0.0 if s == 0 else mdp.beta
            transitions[i, i - 1] = mdp.q
            transitions[i, i] = stay
            transitions[i, i + 1] = mdp.p
    system = np.eye(n) - mdp.gamma * transitions
    return solve_dense(system, costs)


def value_iteration(mdp: MigrationMdp, epsilon: float) -> SolverReport:
    """Iterate the optimality backup from all-zero values.

    Stops when ``gamma / (1 - gamma) * ||V_new - V||_inf <= epsilon``,
    which bounds the sup-norm distance of the returned values from the
    optimum by ``epsilon``.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    contraction = mdp.gamma / (1.0 - mdp.gamma)
    values = np.zeros(mdp.n_states)
    sweeps = 0
    while True:
        new_values, actions = bellman_backup(mdp, values)
        sweeps += 1
        if contraction * float(np.max(np.abs(new_values - values))) <= epsilon:
            return SolverReport(
                values=new_values, policy=actions, iterations=sweeps, linear_solves=0
            )
        values = new_values


def policy_iteration(mdp: MigrationMdp) -> SolverReport:
    """Exact policy iteration from the always-migrate policy.

    Alternates one dense evaluation with one greedy improvement (ties kept
    on ``NO_MIGRATE``) and stops when the greedy policy reproduces the
    evaluated one, at which point the values satisfy the optimality
    equations exactly.
    """
    policy = always_migrate_policy(mdp)
    rounds = 0
    solves = 0
    while True:
        values = evaluate_fixed_policy(mdp, policy)
        solves += 1
        rounds += 1
        _, greedy = bellman_backup(mdp, values)
        if np.array_equal(greedy, policy):
            return SolverReport(
                values=values, policy=policy, iterations=rounds, linear_solves=solves
            )
        policy = greedy
