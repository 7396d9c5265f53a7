"""HTTP facade over the solver library.

Every endpoint is a stateless wrapper around a core function: requests
carry parameters, responses carry plain data, and nothing is cached
between calls. Domain errors (bad probabilities, malformed windows,
unknown solver names) surface as HTTP 400 with the core error message;
solver failures surface as HTTP 500.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .baselines import evaluate_fixed_policy, policy_iteration
from .bench import (
    flatten_records,
    random_instance,
    run_beta_sweep,
    run_compare,
    summary_to_rows,
)
from .mdp import MigrationMdp
from .oracle import (
    exhaustive_threshold_search,
    extended_action_value_iteration,
    is_threshold_policy,
)
from .schemas import (
    CheckResult,
    CompareRequest,
    CompareResponse,
    EvaluateRequest,
    EvaluateResponse,
    HealthResponse,
    OracleCheckRequest,
    OracleCheckResponse,
    ResultRow,
    SimulateRequest,
    SimulateResponse,
    SolveRequest,
    SolveResponse,
    SummaryRowModel,
    SweepRequest,
    SweepResponse,
)
from .simulate import RngStream, monte_carlo_value, truncation_horizon
from .thresholds import find_optimal_thresholds

__all__ = ["app"]

app = FastAPI(title="migmdp", version=__version__)

_CHECK_BETAS = (0.1, 0.5, 1.0, 2.0, 10.0)
_CHECK_GAMMAS = (0.5, 0.9, 0.99)


@app.exception_handler(ValueError)
async def _domain_error(request: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc)})


@app.exception_handler(RuntimeError)
async def _solver_error(request: Request, exc: RuntimeError) -> JSONResponse:
    return JSONResponse(status_code=500, content={"detail": str(exc)})


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=__version__)


@app.post("/solve", response_model=SolveResponse)
def solve(request: SolveRequest) -> SolveResponse:
    mdp = request.mdp.to_mdp()
    result = find_optimal_thresholds(mdp)
    return SolveResponse(
        k1=result.thresholds.k1,
        k2=result.thresholds.k2,
        states=[int(s) for s in mdp.states],
        values=[float(v) for v in result.values],
        outer_iterations=result.outer_iterations,
        linear_solves=result.linear_solves,
    )


@app.post("/evaluate", response_model=EvaluateResponse)
def evaluate(request: EvaluateRequest) -> EvaluateResponse:
    mdp = request.mdp.to_mdp()
    policy = request.policy.to_policy(mdp)
    values = evaluate_fixed_policy(mdp, policy)
    return EvaluateResponse(
        states=[int(s) for s in mdp.states],
        values=[float(v) for v in values],
        policy=[int(a) for a in policy],
    )


@app.post("/compare", response_model=CompareResponse)
def compare(request: CompareRequest) -> CompareResponse:
    records = run_compare(request.to_config())
    return CompareResponse(rows=[ResultRow(**row) for row in flatten_records(records)])


@app.post("/sweep", response_model=SweepResponse)
def sweep(request: SweepRequest) -> SweepResponse:
    records, summary = run_beta_sweep(request.to_config())
    return SweepResponse(
        rows=[ResultRow(**row) for row in flatten_records(records)],
        summary=[SummaryRowModel(**row) for row in summary_to_rows(summary)],
    )


@app.post("/simulate", response_model=SimulateResponse)
def simulate(request: SimulateRequest) -> SimulateResponse:
    mdp = request.mdp.to_mdp()
    policy = request.policy.to_policy(mdp)
    analytic = float(evaluate_fixed_policy(mdp, policy)[mdp.index(request.s0)])
    mean, std_err = monte_carlo_value(
        mdp, policy, request.s0, request.runs, request.tol, RngStream(request.seed)
    )
    return SimulateResponse(
        mean=mean,
        std_err=std_err,
        analytic=analytic,
        abs_error=abs(mean - analytic),
        runs=request.runs,
        horizon=truncation_horizon(mdp, request.tol),
    )


@app.post("/oracle-check", response_model=OracleCheckResponse)
def oracle_check(request: OracleCheckRequest) -> OracleCheckResponse:
    if request.instances < 1:
        raise ValueError(f"instances must be >= 1, got {request.instances}")
    root = RngStream(request.seed)
    epsilon = request.epsilon

    worst_enum = 0.0
    shape_failures: list[int] = []
    worst_upper = 0.0
    worst_restriction = 0.0
    for i in range(request.instances):
        child = root.child(i)
        p, q = random_instance("uniform-simplex", child)
        mdp = MigrationMdp(
            p=p,
            q=q,
            min_offset=request.min_offset,
            max_offset=request.max_offset,
            beta=_CHECK_BETAS[i % len(_CHECK_BETAS)],
            gamma=_CHECK_GAMMAS[i % len(_CHECK_GAMMAS)],
        )
        result = find_optimal_thresholds(mdp)
        _, best = exhaustive_threshold_search(mdp)
        worst_enum = max(worst_enum, float(np.max(np.abs(result.values - best))))
        if not is_threshold_policy(mdp, policy_iteration(mdp).policy):
            shape_failures.append(child.seed)
        extended = extended_action_value_iteration(mdp, epsilon)
        worst_upper = max(worst_upper, float(np.max(extended - result.values)))
        worst_restriction = max(
            worst_restriction, float(np.max(result.values - extended))
        )

    checks = [
        CheckResult(
            name="threshold-matches-exhaustive-search",
            passed=worst_enum <= 1e-9,
            detail=f"max value gap {worst_enum:.3e} over {request.instances} instances",
        ),
        CheckResult(
            name="policy-iteration-is-threshold-shaped",
            passed=not shape_failures,
            detail=(
                "all policies are bands"
                if not shape_failures
                else f"non-band policies at seeds {shape_failures}"
            ),
        ),
        CheckResult(
            name="extended-action-optimum-within-upper-bound",
            passed=worst_upper <= 2 * epsilon,
            detail=(
                f"max extended-over-two-action excess {worst_upper:.3e}; "
                f"two-action exceeds extended by up to {worst_restriction:.3e} "
                "(landing-target restriction, legitimate under drift)"
            ),
        ),
    ]
    return OracleCheckResponse(passed=all(c.passed for c in checks), checks=checks)
