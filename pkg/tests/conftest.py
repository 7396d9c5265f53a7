"""Shared test helpers.

``policy_backup`` is an independent re-derivation of the fixed-policy
Bellman operator, written directly from the cost table and kernels rather
than through the production solvers, so residual checks against it are a
real oracle and not a tautology.

``record_acceptance`` collects one line per acceptance criterion; the
``pytest_terminal_summary`` hook prints the collected lines after the
run, where output capture cannot hide them.
"""

from __future__ import annotations

import numpy as np

from migmdp import Action, MigrationMdp

ACCEPTANCE_RESULTS: list[tuple[int, str]] = []


def record_acceptance(number: int, name: str, passed: bool, detail: str) -> None:
    """Register (and echo) the pass/fail line for one acceptance criterion."""
    status = "PASS" if passed else "FAIL"
    line = f"criterion {number:2d} {status}  {name}: {detail}"
    ACCEPTANCE_RESULTS.append((number, line))
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(line)


def policy_backup(mdp: MigrationMdp, policy: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Apply one step of the fixed-policy Bellman operator, scalar math only."""
    out = np.empty(mdp.n_states)
    stay = 1.0 - mdp.p - mdp.q
    for i, s in enumerate(range(mdp.min_offset, mdp.max_offset + 1)):
        if policy[i] == Action.MIGRATE:
            cost = 0.0 if s == 0 else 1.0
            cont = (
                mdp.q * values[-1 - mdp.min_offset]
                + stay * values[0 - mdp.min_offset]
                + mdp.p * values[1 - mdp.min_offset]
            )
        else:
            cost = 0.0 if s == 0 else mdp.beta
            cont = (
                mdp.q * values[i - 1] + stay * values[i] + mdp.p * values[i + 1]
            )
        out[i] = cost + mdp.gamma * cont
    return out


def random_simplex(rng: np.random.Generator) -> tuple[float, float]:
    """Uniform (p, q) over the triangle p, q >= 0, p + q <= 1."""
    u1, u2 = rng.random(2)
    if u1 + u2 > 1.0:
        u1, u2 = 1.0 - u1, 1.0 - u2
    return float(u1), float(u2)
