"""Exact evaluation and search of double-threshold migration policies.

A threshold policy keeps the service in place while the offset stays inside
a band ``[k1, k2]`` around 0 and migrates outside it. The discounted cost of
such a policy satisfies a linear fixed point on the window
``[k1 - 1, k2 + 1]`` only: every offset at or beyond the band edge migrates,
so it shares the band-edge value, and the window is closed under the
dynamics. Solving that small system exactly and extending it by constant
tails gives the full value function without iteration.

The optimal band is found by alternating exact evaluation with one-sided
scans that move each threshold in the direction the current value function
says is profitable, expanding toward the boundary while keeping the service
pays off and contracting toward 0 while migrating pays off. Each pass costs
one linear solve; the visited bands never repeat, which bounds the passes
by the number of feasible bands plus one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import solve_dense
from .mdp import Action, MigrationMdp

__all__ = [
    "ThresholdPair",
    "ThresholdSolveResult",
    "build_policy_system",
    "evaluate_thresholds",
    "find_optimal_thresholds",
    "threshold_policy",
]


@dataclass(frozen=True)
class ThresholdPair:
    """No-migrate band ``[k1, k2]``; it always contains offset 0.

    Feasibility against an instance (``min_offset < k1 <= 0 <= k2 <
    max_offset``) is checked by the operations that consume the pair.
    """

    k1: int
    k2: int

    def __post_init__(self) -> None:
        if self.k1 > 0 or self.k2 < 0:
            raise ValueError(f"need k1 <= 0 <= k2, got ({self.k1}, {self.k2})")


@dataclass(frozen=True)
class ThresholdSolveResult:
    """Outcome of the optimal-threshold search.

    ``history`` records the pair evaluated at the start of each outer pass,
    in order, so callers can check that it never repeats a band and that
    its length equals ``outer_iterations``.
    """

    thresholds: ThresholdPair
    values: np.ndarray
    outer_iterations: int
    linear_solves: int
    history: tuple[tuple[int, int], ...]


def _check_feasible(mdp: MigrationMdp, thresholds: ThresholdPair) -> None:
    if not (mdp.min_offset < thresholds.k1 and thresholds.k2 < mdp.max_offset):
        raise ValueError(
            f"thresholds ({thresholds.k1}, {thresholds.k2}) must lie strictly "
            f"inside [{mdp.min_offset}, {mdp.max_offset}]"
        )


def threshold_policy(mdp: MigrationMdp, thresholds: ThresholdPair) -> np.ndarray:
    """Materialize the band as a per-offset action array."""
    _check_feasible(mdp, thresholds)
    policy = np.full(mdp.n_states, int(Action.MIGRATE), dtype=np.int64)
    lo = thresholds.k1 - mdp.min_offset
    hi = thresholds.k2 - mdp.min_offset
    policy[lo : hi + 1] = int(Action.NO_MIGRATE)
    return policy


def build_policy_system(
    mdp: MigrationMdp, thresholds: ThresholdPair
) -> tuple[np.ndarray, np.ndarray]:
    """Transition matrix and cost vector of the band's closed window.

    The window covers offsets ``k1 - 1 .. k2 + 1``. Its two edge rows use
    the post-migration kernel (land at 0, then move), interior rows use the
    stay-in-place kernel, and the cost vector charges 1 at the edges,
    ``beta`` inside the band except at 0, and 0 at offset 0. The window
    always contains offsets -1, 0 and 1, so the post-migration kernel never
    needs clipping; this is asserted rather than clipped.

    Returns
    -------
    (transitions, costs) : tuple of numpy.ndarray
        ``transitions`` is row-stochastic with shape ``(n, n)`` and
        ``costs`` has shape ``(n,)`` where ``n = k2 - k1 + 3``.
    """
    _check_feasible(mdp, thresholds)
    k1, k2 = thresholds.k1, thresholds.k2
    lo = k1 - 1
    n = k2 - k1 + 3
    assert lo <= -1 and k2 + 1 >= 1, "window must contain offsets -1, 0, 1"

    stay = 1.0 - mdp.p - mdp.q
    costs = np.full(n, mdp.beta)
    costs[0] = costs[-1] = 1.0
    costs[0 - lo] = 0.0

    transitions = np.zeros((n, n))
    migrate_row = np.zeros(n)
    migrate_row[-1 - lo] = mdp.q
    migrate_row[0 - lo] = stay
    migrate_row[1 - lo] = mdp.p
    transitions[0] = migrate_row
    transitions[-1] = migrate_row
    for s in range(k1, k2 + 1):
        r = s - lo
        transitions[r, r - 1] = mdp.q
        transitions[r, r] = stay
        transitions[r, r + 1] = mdp.p
    return transitions, costs


def evaluate_thresholds(mdp: MigrationMdp, thresholds: ThresholdPair) -> np.ndarray:
    """Exact discounted cost of the threshold policy, one entry per offset.

    Solves ``(I - gamma * P) v = c`` on the window and extends by constant
    tails: every offset at or below ``k1 - 1`` migrates immediately and so
    shares ``v[k1 - 1]``; likewise above ``k2 + 1``.
    """
    transitions, costs = build_policy_system(mdp, thresholds)
    system = np.eye(len(costs)) - mdp.gamma * transitions
    window = solve_dense(system, costs)

    lo_idx = (thresholds.k1 - 1) - mdp.min_offset
    hi_idx = (thresholds.k2 + 1) - mdp.min_offset
    values = np.empty(mdp.n_states)
    values[: lo_idx + 1] = window[0]
    values[lo_idx : hi_idx + 1] = window
    values[hi_idx:] = window[-1]
    return values


def _sign(k: int) -> int:
    if k > 0:
        return 1
    if k < 0:
        return -1
    return 0


def find_optimal_thresholds(mdp: MigrationMdp) -> ThresholdSolveResult:
    """Search the optimal no-migrate band by evaluate-and-scan passes.

    Starting from the band ``[0, 0]``, each pass evaluates the current band
    exactly (one linear solve), then adjusts each threshold once while the
    value function is held fixed. Per threshold, a strict comparison of the
    migrate action's value against the threshold's own value picks the
    direction. Inward (migrating is strictly cheaper): the threshold steps
    one offset toward 0 immediately, then the scan walks the remaining
    offsets toward 0, pulling the threshold past each offset where
    migrating still strictly beats the current value, and stops at the
    first strictly worse offset. Outward (keeping is not strictly worse):
    the scan walks toward the boundary, extending the threshold over each
    offset where keeping the service strictly beats the current value, and
    stops at the first strictly worse offset. Exact ties neither move the
    threshold nor stop the scan. The search ends when a pass leaves both
    thresholds unchanged.

    Returns
    -------
    ThresholdSolveResult
        Optimal pair, its exact value function, pass and solve counters,
        and the sequence of evaluated pairs.
    """
    p, q, beta, gamma = mdp.p, mdp.q, mdp.beta, mdp.gamma
    low, high = mdp.min_offset, mdp.max_offset
    stay = 1.0 - p - q
    i0 = -low

    k1, k2 = 0, 0
    history: list[tuple[int, int]] = []
    linear_solves = 0
    # each pass evaluates a band no earlier pass evaluated, so the pass
    # count cannot exceed the number of feasible bands plus a final
    # no-change pass; exceeding it means the comparisons went numerically
    # inconsistent and the loop would not terminate
    max_passes = (-low) * high + 1
    values = np.empty(0)

    while True:
        history.append((k1, k2))
        if len(history) > max_passes:
            raise RuntimeError(
                f"threshold search exceeded {max_passes} passes; "
                "evaluation is numerically inconsistent"
            )
        values = evaluate_thresholds(mdp, ThresholdPair(k1, k2))
        linear_solves += 1
        migrate_value = (
            1.0
            + gamma
            * (q * values[i0 - 1] + stay * values[i0] + p * values[i0 + 1])
        )

        previous = (k1, k2)
        # lower threshold
        if migrate_value < values[k1 - low]:
            scan = range(k1 + 1, 1)
            k1 += 1
            inward = True
        else:
            scan = range(k1 - 1, low, -1)
            inward = False
        for s in scan:
            if inward:
                if migrate_value < values[s - low]:
                    k1 = s - _sign(s)
                elif migrate_value > values[s - low]:
                    break
            else:
                keep_value = beta + gamma * (
                    q * values[s - 1 - low]
                    + stay * values[s - low]
                    + p * values[s + 1 - low]
                )
                if keep_value < values[s - low]:
                    k1 = s
                elif keep_value > values[s - low]:
                    break

        # upper threshold
        if migrate_value < values[k2 - low]:
            scan = range(k2 - 1, -1, -1)
            k2 -= 1
            inward = True
        else:
            scan = range(k2 + 1, high)
            inward = False
        for s in scan:
            if inward:
                if migrate_value < values[s - low]:
                    k2 = s - _sign(s)
                elif migrate_value > values[s - low]:
                    break
            else:
                keep_value = beta + gamma * (
                    q * values[s - 1 - low]
                    + stay * values[s - low]
                    + p * values[s + 1 - low]
                )
                if keep_value < values[s - low]:
                    k2 = s
                elif keep_value > values[s - low]:
                    break

        if (k1, k2) == previous:
            break

    return ThresholdSolveResult(
        thresholds=ThresholdPair(k1, k2),
        values=values,
        outer_iterations=len(history),
        linear_solves=linear_solves,
        history=tuple(history),
    )
