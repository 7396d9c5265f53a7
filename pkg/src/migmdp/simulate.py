"""Seeded Monte-Carlo simulation of stationary policies.

The simulator exists to cross-check the exact solvers against sampled
discounted cost, so reproducibility is strict: a run is fully determined
by its stream seed, every slot consumes exactly one uniform draw, and the
batch estimator replays run ``r`` from the child stream ``child(r)`` so a
single trajectory can always be re-examined in isolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mdp import Action, MigrationMdp, one_slot_cost, validate_policy

__all__ = [
    "RngStream",
    "Trajectory",
    "monte_carlo_value",
    "sample_trajectory",
    "truncation_horizon",
]


@dataclass(frozen=True)
class RngStream:
    """Seeded random stream with deterministic child derivation.

    ``generator()`` always returns a fresh generator at the stream's
    origin, and ``child(index)`` derives an independent stream by hashing
    ``(seed, index)``, so the same (seed, index) pair yields the same draws
    on every platform and every call.
    """

    seed: int
    algorithm: str = "pcg64"

    def __post_init__(self) -> None:
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)):
            raise ValueError(f"seed must be an integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.algorithm != "pcg64":
            raise ValueError(
                f"unsupported rng algorithm {self.algorithm!r}; only 'pcg64' is available"
            )

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the stream's origin."""
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))

    def child(self, index: int) -> "RngStream":
        """Derived stream number ``index``, independent of this one."""
        if isinstance(index, bool) or not isinstance(index, (int, np.integer)):
            raise ValueError(f"child index must be an integer, got {index!r}")
        if index < 0:
            raise ValueError(f"child index must be >= 0, got {index}")
        derived = np.random.SeedSequence((self.seed, int(index)))
        return RngStream(
            seed=int(derived.generate_state(1, np.uint64)[0]), algorithm=self.algorithm
        )


@dataclass(frozen=True)
class Trajectory:
    """One simulated run: per-slot offsets, actions, costs, and the total.

    ``states[t]`` is the offset observed at the start of slot ``t`` before
    acting; ``discounted_total`` is ``sum(gamma**t * costs[t])`` over the
    recorded horizon.
    """

    states: np.ndarray
    actions: np.ndarray
    costs: np.ndarray
    discounted_total: float


def _step_offsets(mdp: MigrationMdp, offsets: np.ndarray, draws: np.ndarray) -> np.ndarray:
    # one uniform per slot: [0, q) down, [q, q + (1-p-q)) stay, rest up
    stay_edge = mdp.q + (1.0 - mdp.p - mdp.q)
    moves = np.where(draws < mdp.q, -1, np.where(draws < stay_edge, 0, 1))
    return offsets + moves


def sample_trajectory(
    mdp: MigrationMdp,
    policy: np.ndarray,
    s0: int,
    horizon: int,
    rng: RngStream,
) -> Trajectory:
    """Simulate ``horizon`` slots of a policy from offset ``s0``.

    Each slot observes the offset, applies the policy's action, accrues
    the discounted one-slot cost, resets the offset to 0 if the action
    migrated, then moves the offset by the user's step. Offsets are
    asserted to stay inside ``[min_offset, max_offset]``; a violation is a
    bug, never something to clamp away.

    Raises
    ------
    ValueError
        If ``s0`` is outside the offset range or ``horizon`` < 1.
    """
    policy = validate_policy(mdp, policy)
    if isinstance(s0, bool) or not isinstance(s0, (int, np.integer)):
        raise ValueError(f"s0 must be an integer, got {s0!r}")
    if not mdp.min_offset <= s0 <= mdp.max_offset:
        raise ValueError(
            f"start offset {s0} outside [{mdp.min_offset}, {mdp.max_offset}]"
        )
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")

    draws = rng.generator().random(horizon)
    states = np.empty(horizon, dtype=np.int64)
    actions = np.empty(horizon, dtype=np.int64)
    costs = np.empty(horizon)
    s = int(s0)
    for t in range(horizon):
        a = int(policy[s - mdp.min_offset])
        states[t] = s
        actions[t] = a
        costs[t] = one_slot_cost(mdp, s, a)
        if a == Action.MIGRATE:
            s = 0
        s = int(_step_offsets(mdp, np.asarray(s), draws[t]))
        assert mdp.min_offset <= s <= mdp.max_offset, "offset escaped its range"

    total = float(np.dot(mdp.gamma ** np.arange(horizon), costs))
    return Trajectory(states=states, actions=actions, costs=costs, discounted_total=total)


def truncation_horizon(mdp: MigrationMdp, tol: float) -> int:
    """Slots needed so the ignored tail cost is at most ``tol``.

    The per-slot cost never exceeds ``max(beta, 1)``, so everything after
    slot ``T`` contributes at most ``gamma**T * max(beta, 1) / (1 - gamma)``.
    """
    if not tol > 0.0:
        raise ValueError(f"truncation tolerance must be > 0, got {tol}")
    tail_cap = max(mdp.beta, 1.0) / (1.0 - mdp.gamma)
    if tail_cap <= tol:
        return 1
    return max(1, math.ceil(math.log(tol / tail_cap) / math.log(mdp.gamma)))


def monte_carlo_value(
    mdp: MigrationMdp,
    policy: np.ndarray,
    s0: int,
    runs: int,
    truncation_tol: float,
    rng: RngStream | int,
) -> tuple[float, float]:
    """Estimate a policy's discounted cost from ``s0`` by simulation.

    Runs ``runs`` independent trajectories, each truncated at the horizon
    where the ignored tail is below ``truncation_tol``, and each driven by
    ``rng.child(r)`` so that run ``r`` reproduces ``sample_trajectory``
    with that child stream exactly. ``rng`` may be a stream or a bare
    master seed. Returns the sample mean and its standard error; the
    reduction order is fixed, so identical seeds give bit-identical
    results.

    Raises
    ------
    ValueError
        If ``runs`` < 2 (no standard error from one run) or the start
        offset is invalid.
    """
    if not isinstance(rng, RngStream):
        rng = RngStream(rng)
    policy = validate_policy(mdp, policy)
    if runs < 2:
        raise ValueError(f"runs must be >= 2, got {runs}")
    if isinstance(s0, bool) or not isinstance(s0, (int, np.integer)):
        raise ValueError(f"s0 must be an integer, got {s0!r}")
    if not mdp.min_offset <= s0 <= mdp.max_offset:
        raise ValueError(
            f"start offset {s0} outside [{mdp.min_offset}, {mdp.max_offset}]"
        )

    horizon = truncation_horizon(mdp, truncation_tol)
    draws = np.empty((runs, horizon))
    for r in range(runs):
        draws[r] = rng.child(r).generator().random(horizon)

    offsets = np.full(runs, int(s0), dtype=np.int64)
    totals = np.zeros(runs)
    migrate = int(Action.MIGRATE)
    discount = 1.0
    for t in range(horizon):
        acts = policy[offsets - mdp.min_offset]
        slot_costs = np.where(
            offsets == 0, 0.0, np.where(acts == migrate, 1.0, mdp.beta)
        )
        totals += discount * slot_costs
        offsets = np.where(acts == migrate, 0, offsets)
        offsets = _step_offsets(mdp, offsets, draws[:, t])
        assert offsets.min() >= mdp.min_offset and offsets.max() <= mdp.max_offset
        discount *= mdp.gamma

    mean = float(np.mean(totals))
    std_err = float(np.std(totals, ddof=1) / math.sqrt(runs))
    return mean, std_err
