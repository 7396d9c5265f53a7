"""Request and response models for the HTTP service.

These models carry the wire format only; domain validation lives in the
core dataclasses, whose ValueErrors the service maps to HTTP 400. Keeping
validation in one place means the CLI, the service, and direct library use
all reject bad inputs with identical messages.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict

from .baselines import always_migrate_policy, never_migrate_policy
from .bench import SOLVER_NAMES, ExperimentConfig
from .mdp import MigrationMdp
from .thresholds import ThresholdPair, find_optimal_thresholds, threshold_policy

__all__ = [
    "CheckResult",
    "CompareRequest",
    "CompareResponse",
    "EvaluateRequest",
    "EvaluateResponse",
    "HealthResponse",
    "MdpParams",
    "OracleCheckRequest",
    "OracleCheckResponse",
    "PolicySpec",
    "ResultRow",
    "SimulateRequest",
    "SimulateResponse",
    "SolveRequest",
    "SolveResponse",
    "SummaryRowModel",
    "SweepRequest",
    "SweepResponse",
]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid")


class MdpParams(_Model):
    p: float
    q: float
    min_offset: int = -10
    max_offset: int = 10
    beta: float = 0.5
    gamma: float = 0.9

    def to_mdp(self) -> MigrationMdp:
        return MigrationMdp(
            p=self.p,
            q=self.q,
            min_offset=self.min_offset,
            max_offset=self.max_offset,
            beta=self.beta,
            gamma=self.gamma,
        )


class PolicySpec(_Model):
    """A policy named by construction rule rather than by action vector."""

    kind: Literal["never", "always", "optimal", "threshold"]
    k1: int | None = None
    k2: int | None = None

    def to_policy(self, mdp: MigrationMdp) -> np.ndarray:
        if self.kind == "never":
            return never_migrate_policy(mdp)
        if self.kind == "always":
            return always_migrate_policy(mdp)
        if self.kind == "optimal":
            result = find_optimal_thresholds(mdp)
            return threshold_policy(mdp, result.thresholds)
        if self.k1 is None or self.k2 is None:
            raise ValueError("threshold policy needs both k1 and k2")
        return threshold_policy(mdp, ThresholdPair(self.k1, self.k2))


class HealthResponse(_Model):
    status: str
    version: str


class SolveRequest(_Model):
    mdp: MdpParams


class SolveResponse(_Model):
    k1: int
    k2: int
    states: list[int]
    values: list[float]
    outer_iterations: int
    linear_solves: int


class EvaluateRequest(_Model):
    mdp: MdpParams
    policy: PolicySpec


class EvaluateResponse(_Model):
    states: list[int]
    values: list[float]
    policy: list[int]


class CompareRequest(_Model):
    min_offset: int = -10
    max_offset: int = 10
    gamma: float = 0.9
    betas: list[float] = [0.5]
    epsilon: float = 0.1
    instances: int = 1000
    seed: int = 0
    rule: str = "uniform-simplex"
    solvers: list[str] = list(SOLVER_NAMES)
    s0: int = 0

    def to_config(self) -> ExperimentConfig:
        return ExperimentConfig(
            min_offset=self.min_offset,
            max_offset=self.max_offset,
            gamma=self.gamma,
            betas=tuple(self.betas),
            epsilon=self.epsilon,
            instances=self.instances,
            seed=self.seed,
            rule=self.rule,
            solvers=tuple(self.solvers),
            s0=self.s0,
        )


class ResultRow(_Model):
    beta: float
    gamma: float
    p: float
    q: float
    seed: int
    solver: str
    v_s0: float
    k1: int | None
    k2: int | None
    wall_time_s: float
    iterations: int
    linear_solves: int


class CompareResponse(_Model):
    rows: list[ResultRow]


class SweepRequest(CompareRequest):
    pass


class SummaryRowModel(_Model):
    beta: float
    gamma: float
    solver: str
    mean_v_s0: float
    mean_wall_time_s: float
    instances: int


class SweepResponse(_Model):
    rows: list[ResultRow]
    summary: list[SummaryRowModel]


class SimulateRequest(_Model):
    mdp: MdpParams
    policy: PolicySpec
    runs: int = 100_000
    s0: int = 0
    tol: float = 1e-3
    seed: int = 0


class SimulateResponse(_Model):
    mean: float
    std_err: float
    analytic: float
    abs_error: float
    runs: int
    horizon: int


class OracleCheckRequest(_Model):
    min_offset: int = -3
    max_offset: int = 3
    instances: int = 25
    seed: int = 0
    epsilon: float = 1e-4


class CheckResult(_Model):
    name: str
    passed: bool
    detail: str


class OracleCheckResponse(_Model):
    passed: bool
    checks: list[CheckResult]
