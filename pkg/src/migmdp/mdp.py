"""Core model of the service-migration control problem.

A service instance runs on one edge host while its user performs a lazy
random walk over a 1-D region. The state is the signed offset between the
user's location and the host running the service, confined to
``[min_offset, max_offset]``. Each time slot the controller either leaves
the service where it is, paying a transmission cost ``beta`` whenever the
offset is nonzero, or migrates it to the user's current location, paying
the migration cost (normalized to 1, with transmission free that slot
because the service is co-located after the move). Migration is mandatory
at the two boundary offsets. After the action the user moves: offset down
with probability ``q``, unchanged with probability ``1 - p - q``, up with
probability ``p``. Future costs are discounted by ``gamma`` per slot.

Value functions and policies are plain numpy arrays indexed by
``s - min_offset``; every module in this package shares that convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

__all__ = [
    "Action",
    "MigrationMdp",
    "MoveDistribution",
    "bellman_backup",
    "movement_distribution",
    "one_slot_cost",
    "validate_policy",
]


class Action(IntEnum):
    """Controller decision for one slot."""

    NO_MIGRATE = 0
    MIGRATE = 1


def _require_int(name: str, value: object) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class MigrationMdp:
    """Validated, immutable problem instance.

    Parameters
    ----------
    p : float
        Per-slot probability that the offset increases by 1.
    q : float
        Per-slot probability that the offset decreases by 1. Requires
        ``p >= 0``, ``q >= 0`` and ``p + q <= 1``; the boundary values
        (``p + q = 1``, or ``p = q = 0`` for a static user) are allowed.
    min_offset : int
        Most negative reachable offset. Must be <= -1. Migration is forced
        here.
    max_offset : int
        Most positive reachable offset. Must be >= 1. Migration is forced
        here.
    beta : float
        Transmission cost per slot served at a nonzero offset, expressed
        as a fraction of the migration cost. Must be >= 0.
    gamma : float
        Discount factor, strictly between 0 and 1.
    """

    p: float
    q: float
    min_offset: int
    max_offset: int
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "q", float(self.q))
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "min_offset", _require_int("min_offset", self.min_offset))
        object.__setattr__(self, "max_offset", _require_int("max_offset", self.max_offset))
        if not (np.isfinite(self.p) and np.isfinite(self.q)):
            raise ValueError(f"probabilities must be finite, got p={self.p}, q={self.q}")
        if self.p < 0.0 or self.q < 0.0 or self.p + self.q > 1.0:
            raise ValueError(
                f"need p >= 0, q >= 0 and p + q <= 1, got p={self.p}, q={self.q}"
            )
        if self.min_offset > -1:
            raise ValueError(f"min_offset must be <= -1, got {self.min_offset}")
        if self.max_offset < 1:
            raise ValueError(f"max_offset must be >= 1, got {self.max_offset}")
        if not np.isfinite(self.beta) or self.beta < 0.0:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")
        if not 0.0 < self.gamma < 1.0 or not np.isfinite(self.gamma):
            raise ValueError(f"gamma must lie strictly in (0, 1), got {self.gamma}")

    @property
    def n_states(self) -> int:
        """Number of reachable offsets."""
        return self.max_offset - self.min_offset + 1

    @property
    def states(self) -> np.ndarray:
        """All offsets, ``min_offset .. max_offset`` in order."""
        return np.arange(self.min_offset, self.max_offset + 1)

    def index(self, s: int) -> int:
        """Array index of offset ``s``; raises if out of range."""
        s = _require_int("s", s)
        if not self.min_offset <= s <= self.max_offset:
            raise ValueError(
                f"offset {s} outside [{self.min_offset}, {self.max_offset}]"
            )
        return s - self.min_offset


@dataclass(frozen=True)
class MoveDistribution:
    """Per-slot distribution of the offset increment."""

    prob_down: float
    prob_stay: float
    prob_up: float


def movement_distribution(mdp: MigrationMdp) -> MoveDistribution:
    """Distribution of the user's movement applied after every action."""
    return MoveDistribution(
        prob_down=mdp.q, prob_stay=1.0 - mdp.p - mdp.q, prob_up=mdp.p
    )


def one_slot_cost(mdp: MigrationMdp, s: int, action: int) -> float:
    """Cost incurred in a single slot at offset ``s`` under ``action``.

    Serving at offset 0 is free either way. Elsewhere, keeping the service
    in place costs ``beta`` and migrating costs 1. Raises ``ValueError``
    when ``s`` is out of range or when ``action`` is ``NO_MIGRATE`` at a
    boundary offset, where migration is mandatory.
    """
    s = _require_int("s", s)
    if not mdp.min_offset <= s <= mdp.max_offset:
        raise ValueError(
            f"offset {s} outside [{mdp.min_offset}, {mdp.max_offset}]"
        )
    act = Action(action)
    if s in (mdp.min_offset, mdp.max_offset) and act is not Action.MIGRATE:
        raise ValueError(f"migration is mandatory at boundary offset {s}")
    if s == 0:
        return 0.0
    return 1.0 if act is Action.MIGRATE else float(mdp.beta)


def bellman_backup(
    mdp: MigrationMdp, values: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """One optimality backup over all offsets.

    For each offset the backup compares the one-slot cost plus discounted
    expected continuation of both actions and keeps the minimum. Migrating
    resets the offset to 0 before the user moves, so every migrate action
    shares one continuation value; ties go to ``NO_MIGRATE``, offset 0 is
    reported as ``NO_MIGRATE``, and the boundary offsets always migrate.

    Parameters
    ----------
    mdp : MigrationMdp
    values : numpy.ndarray
        Current value estimates, one per offset.

    Returns
    -------
    (new_values, greedy_actions) : tuple of numpy.ndarray
        Backed-up values and the argmin action per offset.
    """
    v = np.asarray(values, dtype=float)
    if v.shape != (mdp.n_states,):
        raise ValueError(f"values must have shape ({mdp.n_states},), got {v.shape}")
    stay = 1.0 - mdp.p - mdp.q
    i0 = -mdp.min_offset
    landing = mdp.q * v[i0 - 1] + stay * v[i0] + mdp.p * v[i0 + 1]
    migrate_value = 1.0 + mdp.gamma * landing
    keep = mdp.beta + mdp.gamma * (mdp.q * v[:-2] + stay * v[1:-1] + mdp.p * v[2:])

    out = np.empty_like(v)
    actions = np.full(mdp.n_states, int(Action.MIGRATE), dtype=np.int64)
    out[0] = out[-1] = migrate_value
    out[1:-1] = np.minimum(keep, migrate_value)
    actions[1:-1] = np.where(
        migrate_value < keep, int(Action.MIGRATE), int(Action.NO_MIGRATE)
    )
    # offset 0 serves locally for free under either action
    out[i0] = mdp.gamma * landing
    actions[i0] = int(Action.NO_MIGRATE)
    return out, actions


def validate_policy(mdp: MigrationMdp, policy: np.ndarray) -> np.ndarray:
    """Check a stationary policy array and return it as int64.

    A policy holds one action per offset. Boundary offsets must migrate.
    """
    arr = np.asarray(policy)
    if arr.shape != (mdp.n_states,):
        raise ValueError(f"policy must have shape ({mdp.n_states},), got {arr.shape}")
    if not np.isin(arr, (int(Action.NO_MIGRATE), int(Action.MIGRATE))).all():
        raise ValueError("policy entries must be Action values (0 or 1)")
    arr = arr.astype(np.int64)
    if arr[0] != Action.MIGRATE or arr[-1] != Action.MIGRATE:
        raise ValueError("boundary offsets must use the migrate action")
    return arr
