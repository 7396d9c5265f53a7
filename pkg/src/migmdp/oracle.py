"""Brute-force ground truth for validating the fast solvers.

Nothing here is clever on purpose: the exhaustive search evaluates every
feasible band, the policy checker inspects the raw action array, and the
widened-action sweep lets the controller migrate anywhere to confirm that
migrating to the user's location is all it ever needs. These are the
oracles the package's own tests (and the ``oracle-check`` command) trust.
"""

from __future__ import annotations

import numpy as np

from .mdp import Action, MigrationMdp, validate_policy
from .thresholds import ThresholdPair, evaluate_thresholds

__all__ = [
    "exhaustive_threshold_search",
    "extended_action_value_iteration",
    "is_threshold_policy",
]


def exhaustive_threshold_search(
    mdp: MigrationMdp, max_pairs: int = 10_000
) -> tuple[ThresholdPair, np.ndarray]:
    """Evaluate every feasible band and return the pointwise-best one.

    A band can be best at one offset without being best at another (with a
    near-static user, every band ties at offset 0), so the winner is the
    band whose whole value function sits within 1e-9 of the pointwise
    minimum over all bands. At least one such band must exist; none
    existing means the evaluator is broken, and that raises rather than
    returning a best-effort answer. Candidates are scanned in order of
    increasing ``|k1|`` then ``k2``, and the first simultaneous minimizer
    wins, so ties resolve to the smallest ``|k1|`` then the smallest
    ``k2``.

    Raises
    ------
    ValueError
        If the instance has more than ``max_pairs`` feasible bands.
    """
    n_pairs = (-mdp.min_offset) * mdp.max_offset
    if n_pairs > max_pairs:
        raise ValueError(
            f"{n_pairs} feasible threshold pairs exceed the budget of {max_pairs}"
        )

    pairs: list[ThresholdPair] = []
    all_values: list[np.ndarray] = []
    for k1_mag in range(0, -mdp.min_offset):
        for k2 in range(0, mdp.max_offset):
            pair = ThresholdPair(-k1_mag, k2)
            pairs.append(pair)
            all_values.append(evaluate_thresholds(mdp, pair))

    pointwise_min = np.min(np.stack(all_values), axis=0)
    for pair, values in zip(pairs, all_values):
        if float(np.max(np.abs(values - pointwise_min))) <= 1e-9:
            return pair, values
    raise AssertionError(
        "no band achieves the pointwise minimum simultaneously; evaluation is broken"
    )


def is_threshold_policy(mdp: MigrationMdp, policy: np.ndarray) -> bool:
    """Whether a policy is a double-threshold band around offset 0.

    The action at offset 0 is irrelevant (both cost nothing there and land
    in the same place), so it is canonicalized to ``NO_MIGRATE`` before
    checking. True when the no-migrate offsets form one contiguous block
    containing 0.
    """
    policy = validate_policy(mdp, policy).copy()
    i0 = -mdp.min_offset
    policy[i0] = int(Action.NO_MIGRATE)
    keep = np.flatnonzero(policy == int(Action.NO_MIGRATE))
    contiguous = bool(np.all(np.diff(keep) == 1))
    return contiguous and keep[0] <= i0 <= keep[-1]


def extended_action_value_iteration(mdp: MigrationMdp, epsilon: float) -> np.ndarray:
    """Optimal values when migration may target any interior offset.

    Widens the action set: besides keeping the service in place, the
    controller may migrate it so the post-migration offset becomes any
    ``d`` in ``[min_offset + 1, max_offset - 1]``, paying 1 for the move
    plus ``beta`` for the slot unless ``d = 0``. Boundary offsets must
    migrate (to some ``d``). Value-iterates with the same stopping rule as
    the two-action solver and returns the values, which should match the
    two-action optimum to within ``2 * epsilon`` if migrating anywhere
    other than the user's location never helps.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    stay = 1.0 - mdp.p - mdp.q
    contraction = mdp.gamma / (1.0 - mdp.gamma)
    n = mdp.n_states
    i0 = -mdp.min_offset
    interior = mdp.states[1:-1]
    # per-slot cost of serving at each interior offset after a migration
    migrate_costs = 1.0 + mdp.beta * (interior != 0)
    keep_costs = mdp.beta * (interior != 0).astype(float)

    values = np.zeros(n)
    while True:
        continuation = mdp.gamma * (
            mdp.q * values[:-2] + stay * values[1:-1] + mdp.p * values[2:]
        )
        best_migrate = float(np.min(migrate_costs + continuation))
        new_values = np.empty(n)
        new_values[0] = new_values[-1] = best_migrate
        new_values[1:-1] = np.minimum(keep_costs + continuation, best_migrate)
        if contraction * float(np.max(np.abs(new_values - values))) <= epsilon:
            return new_values
        values = new_values
