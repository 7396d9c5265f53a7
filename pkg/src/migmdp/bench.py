"""Randomized benchmark runs comparing the solvers, with CSV/JSON output.

A benchmark draws random instances from a master seed, runs a selected set
of solvers on every (instance, beta) combination, and records the value at
the start offset together with work counters and wall time. Reruns with
the same master seed reproduce everything except the wall-time fields.
"""

from __future__ import annotations

import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from .baselines import (
    always_migrate_policy,
    evaluate_fixed_policy,
    never_migrate_policy,
    policy_iteration,
    value_iteration,
)
from .mdp import MigrationMdp
from .simulate import RngStream
from .thresholds import find_optimal_thresholds

__all__ = [
    "CSV_COLUMNS",
    "SOLVER_NAMES",
    "ExperimentConfig",
    "SolverOutcome",
    "SummaryRow",
    "SweepRecord",
    "emit_results",
    "random_instance",
    "run_beta_sweep",
    "run_compare",
]

SOLVER_NAMES = (
    "threshold",
    "policy_iteration",
    "value_iteration",
    "never_migrate",
    "always_migrate",
)

CSV_COLUMNS = (
    "beta",
    "gamma",
    "p",
    "q",
    "seed",
    "solver",
    "v_s0",
    "k1",
    "k2",
    "wall_time_s",
    "iterations",
    "linear_solves",
)

SUMMARY_COLUMNS = (
    "beta",
    "gamma",
    "solver",
    "mean_v_s0",
    "mean_wall_time_s",
    "instances",
)

INSTANCE_RULES = ("uniform-simplex",)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated benchmark parameters.

    Defaults match the headline experiment: offsets in [-10, 10], 1000
    random instances, value-iteration accuracy 0.1, all solvers.
    """

    min_offset: int = -10
    max_offset: int = 10
    gamma: float = 0.9
    betas: tuple[float, ...] = (0.5,)
    epsilon: float = 0.1
    instances: int = 1000
    seed: int = 0
    rule: str = "uniform-simplex"
    solvers: tuple[str, ...] = SOLVER_NAMES
    s0: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "solvers", tuple(self.solvers))
        # probe instance validates bounds and gamma under the same rules
        # every real instance will face
        MigrationMdp(
            p=0.25,
            q=0.25,
            min_offset=self.min_offset,
            max_offset=self.max_offset,
            beta=self.betas[0] if self.betas else 0.0,
            gamma=self.gamma,
        )
        if not self.betas:
            raise ValueError("betas must not be empty")
        for b in self.betas:
            if not np.isfinite(b) or b < 0.0:
                raise ValueError(f"beta must be finite and >= 0, got {b}")
        if not self.epsilon > 0.0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.instances < 1:
            raise ValueError(f"instances must be >= 1, got {self.instances}")
        if self.seed < 0:
            raise ValueError(f"seed must be >= 0, got {self.seed}")
        if self.rule not in INSTANCE_RULES:
            raise ValueError(f"unknown instance rule {self.rule!r}")
        if not self.solvers:
            raise ValueError("solver selection must not be empty")
        for name in self.solvers:
            if name not in SOLVER_NAMES:
                raise ValueError(
                    f"unknown solver {name!r}; expected one of {SOLVER_NAMES}"
                )
        if not self.min_offset <= self.s0 <= self.max_offset:
            raise ValueError(
                f"s0={self.s0} outside [{self.min_offset}, {self.max_offset}]"
            )


@dataclass(frozen=True)
class SolverOutcome:
    """One solver's result on one (instance, beta) combination."""

    v_s0: float
    k1: int | None
    k2: int | None
    wall_time_s: float
    iterations: int
    linear_solves: int


@dataclass(frozen=True)
class SweepRecord:
    """One (instance, beta) combination with outcomes per solver."""

    beta: float
    gamma: float
    p: float
    q: float
    seed: int
    results: dict[str, SolverOutcome] = field(default_factory=dict)


@dataclass(frozen=True)
class SummaryRow:
    """Per (beta, solver) aggregate over all instances of a sweep."""

    beta: float
    gamma: float
    solver: str
    mean_v_s0: float
    mean_wall_time_s: float
    instances: int


def random_instance(rule: str, rng: RngStream) -> tuple[float, float]:
    """Draw movement probabilities ``(p, q)`` for one random instance.

    The ``uniform-simplex`` rule draws a point uniformly from the triangle
    ``p >= 0, q >= 0, p + q <= 1`` by folding the unit square: draw
    ``(u1, u2)`` and reflect to ``(1 - u1, 1 - u2)`` when ``u1 + u2 > 1``.
    """
    if rule not in INSTANCE_RULES:
        raise ValueError(f"unknown instance rule {rule!r}")
    u1, u2 = rng.generator().random(2)
    if u1 + u2 > 1.0:
        u1, u2 = 1.0 - u1, 1.0 - u2
    return float(u1), float(u2)


def _run_solver(name: str, mdp: MigrationMdp, epsilon: float, s0_index: int) -> SolverOutcome:
    k1: int | None = None
    k2: int | None = None
    if name == "threshold":
        start = time.perf_counter()
        result = find_optimal_thresholds(mdp)
        wall = time.perf_counter() - start
        values = result.values
        k1, k2 = result.thresholds.k1, result.thresholds.k2
        iterations, solves = result.outer_iterations, result.linear_solves
    elif name == "policy_iteration":
        start = time.perf_counter()
        report = policy_iteration(mdp)
        wall = time.perf_counter() - start
        values, iterations, solves = report.values, report.iterations, report.linear_solves
    elif name == "value_iteration":
        start = time.perf_counter()
        report = value_iteration(mdp, epsilon)
        wall = time.perf_counter() - start
        values, iterations, solves = report.values, report.iterations, report.linear_solves
    elif name in ("never_migrate", "always_migrate"):
        policy = (
            never_migrate_policy(mdp)
            if name == "never_migrate"
            else always_migrate_policy(mdp)
        )
        start = time.perf_counter()
        values = evaluate_fixed_policy(mdp, policy)
        wall = time.perf_counter() - start
        iterations, solves = 0, 1
    else:
        raise ValueError(f"unknown solver {name!r}; expected one of {SOLVER_NAMES}")
    return SolverOutcome(
        v_s0=float(values[s0_index]),
        k1=k1,
        k2=k2,
        wall_time_s=wall,
        iterations=iterations,
        linear_solves=solves,
    )


def run_compare(config: ExperimentConfig) -> list[SweepRecord]:
    """Run every selected solver on every (instance, beta) combination.

    Instance ``i`` draws its movement probabilities from the master seed's
    child stream ``i``; the child's own seed is recorded with the results,
    so any single instance can be reconstructed without rerunning the
    sweep. Records come back sorted by (beta, seed). A solver failure is
    re-raised with the failing instance's parameters attached.
    """
    root = RngStream(config.seed)
    drawn = []
    for i in range(config.instances):
        stream = root.child(i)
        p, q = random_instance(config.rule, stream)
        drawn.append((stream.seed, p, q))

    records: list[SweepRecord] = []
    for beta in config.betas:
        for seed_i, p, q in drawn:
            mdp = MigrationMdp(
                p=p,
                q=q,
                min_offset=config.min_offset,
                max_offset=config.max_offset,
                beta=beta,
                gamma=config.gamma,
            )
            s0_index = mdp.index(config.s0)
            results: dict[str, SolverOutcome] = {}
            for name in config.solvers:
                try:
                    results[name] = _run_solver(name, mdp, config.epsilon, s0_index)
                except Exception as exc:
                    raise RuntimeError(
                        f"solver {name!r} failed on instance seed={seed_i} "
                        f"(p={p!r}, q={q!r}, beta={beta!r}, gamma={config.gamma!r}): {exc}"
                    ) from exc
            records.append(
                SweepRecord(beta=beta, gamma=config.gamma, p=p, q=q, seed=seed_i, results=results)
            )
    records.sort(key=lambda rec: (rec.beta, rec.seed))
    return records


def run_beta_sweep(
    config: ExperimentConfig,
) -> tuple[list[SweepRecord], list[SummaryRow]]:
    """Full sweep plus per-(beta, solver) means of cost and wall time."""
    records = run_compare(config)
    summary: list[SummaryRow] = []
    for beta in sorted(set(rec.beta for rec in records)):
        batch = [rec for rec in records if rec.beta == beta]
        for name in config.solvers:
            outcomes = [rec.results[name] for rec in batch if name in rec.results]
            if not outcomes:
                continue
            summary.append(
                SummaryRow(
                    beta=beta,
                    gamma=config.gamma,
                    solver=name,
                    mean_v_s0=float(np.mean([o.v_s0 for o in outcomes])),
                    mean_wall_time_s=float(np.mean([o.wall_time_s for o in outcomes])),
                    instances=len(outcomes),
                )
            )
    return records, summary


def _fmt(value: float) -> str:
    return format(float(value), ".9g")


def flatten_records(records: list[SweepRecord]) -> list[dict]:
    """One dict per (record, solver), in canonical solver order."""
    rows: list[dict] = []
    for rec in records:
        for name in SOLVER_NAMES:
            outcome = rec.results.get(name)
            if outcome is None:
                continue
            rows.append(
                {
                    "beta": rec.beta,
                    "gamma": rec.gamma,
                    "p": rec.p,
                    "q": rec.q,
                    "seed": rec.seed,
                    "solver": name,
                    "v_s0": outcome.v_s0,
                    "k1": outcome.k1,
                    "k2": outcome.k2,
                    "wall_time_s": outcome.wall_time_s,
                    "iterations": outcome.iterations,
                    "linear_solves": outcome.linear_solves,
                }
            )
    return rows


def emit_results(records: list[SweepRecord], fmt: str, destination: str) -> None:
    """Write flattened records as CSV or JSON to a path or ``-`` (stdout).

    Floats are printed with 9 significant digits. The threshold columns
    ``k1``/``k2`` are empty (CSV) or null (JSON) for solvers that do not
    produce thresholds. Output bytes are reproducible run to run except
    for the ``wall_time_s`` field.
    """
    if not records:
        raise ValueError("no records to emit")
    write_result_rows(flatten_records(records), fmt, destination)


def write_result_rows(rows: list[dict], fmt: str, destination: str) -> None:
    """Write already-flattened result rows in the same formats as emit_results.

    Lets a client render rows it received over the wire byte-identically to
    a local run.
    """
    if not rows:
        raise ValueError("no records to emit")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown output format {fmt!r}; expected 'csv' or 'json'")
    if destination == "-":
        _write_rows(sys.stdout, rows, fmt)
        return
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        _write_rows(fh, rows, fmt)


def summary_to_rows(summary: list[SummaryRow]) -> list[dict]:
    """Summary rows as plain dicts keyed by SUMMARY_COLUMNS."""
    return [
        {column: getattr(row, column) for column in SUMMARY_COLUMNS}
        for row in summary
    ]


def write_summary_rows(rows: list[dict], fmt: str, destination: str) -> None:
    """Write per-(beta, solver) aggregates as CSV or JSON."""
    if not rows:
        raise ValueError("no summary rows to emit")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown output format {fmt!r}; expected 'csv' or 'json'")

    def write(fh) -> None:
        if fmt == "csv":
            fh.write(",".join(SUMMARY_COLUMNS) + "\n")
            for row in rows:
                cells = [
                    _fmt(row["beta"]),
                    _fmt(row["gamma"]),
                    row["solver"],
                    _fmt(row["mean_v_s0"]),
                    _fmt(row["mean_wall_time_s"]),
                    str(row["instances"]),
                ]
                fh.write(",".join(cells) + "\n")
        else:
            payload = [
                {
                    **row,
                    "beta": float(_fmt(row["beta"])),
                    "gamma": float(_fmt(row["gamma"])),
                    "mean_v_s0": float(_fmt(row["mean_v_s0"])),
                    "mean_wall_time_s": float(_fmt(row["mean_wall_time_s"])),
                }
                for row in rows
            ]
            json.dump(payload, fh, indent=2)
            fh.write("\n")

    if destination == "-":
        write(sys.stdout)
        return
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        write(fh)


def _write_rows(fh, rows: list[dict], fmt: str) -> None:
    if fmt == "csv":
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            cells = [
                _fmt(row["beta"]),
                _fmt(row["gamma"]),
                _fmt(row["p"]),
                _fmt(row["q"]),
                str(row["seed"]),
                row["solver"],
                _fmt(row["v_s0"]),
                "" if row["k1"] is None else str(row["k1"]),
                "" if row["k2"] is None else str(row["k2"]),
                _fmt(row["wall_time_s"]),
                str(row["iterations"]),
                str(row["linear_solves"]),
            ]
            fh.write(",".join(cells) + "\n")
    else:
        payload = [
            {
                **row,
                "beta": float(_fmt(row["beta"])),
                "gamma": float(_fmt(row["gamma"])),
                "p": float(_fmt(row["p"])),
                "q": float(_fmt(row["q"])),
                "v_s0": float(_fmt(row["v_s0"])),
                "wall_time_s": float(_fmt(row["wall_time_s"])),
            }
            for row in rows
        ]
        json.dump(payload, fh, indent=2)
        fh.write("\n")
