"""Command-line client for the solver service.

Every subcommand resolves its options (flags win over an optional config
file, which wins over defaults), posts one request to the HTTP service,
and renders the response. By default the bundled app is called in-process,
so no server needs to be running; ``--server URL`` points the same
requests at a remote instance instead.

Exit codes: 0 success, 1 solver or I/O failure, 2 usage error.

If the environment variable ``MIGMDP_OUTPUT_DIR`` is set, relative output
paths (``--output``, ``--summary-output``) are placed under it.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import math
import os
import sys

import httpx

from .bench import SOLVER_NAMES, write_result_rows, write_summary_rows

__all__ = ["main"]

OUTPUT_DIR_VAR = "MIGMDP_OUTPUT_DIR"

_MDP_DEFAULTS = {"min_offset": -10, "max_offset": 10, "beta": 0.5, "gamma": 0.9}
_RUN_DEFAULTS = {
    "min_offset": -10,
    "max_offset": 10,
    "gamma": 0.9,
    "betas": "0.5",
    "epsilon": 0.1,
    "instances": 1000,
    "seed": 0,
    "rule": "uniform-simplex",
    "solvers": ",".join(SOLVER_NAMES),
    "s0": 0,
    "output": "-",
    "format": "csv",
}
_SIMULATE_DEFAULTS = {"runs": 100_000, "s0": 0, "tol": 1e-3, "seed": 0}
_ORACLE_DEFAULTS = {
    "min_offset": -3,
    "max_offset": 3,
    "instances": 25,
    "seed": 0,
    "epsilon": 1e-4,
}


def _g(value: float) -> str:
    return format(float(value), ".9g")


class ServiceClient:
    """Posts requests either in-process (default) or to ``--server URL``."""

    def __init__(self, server: str | None):
        self.server = server

    def request(self, method: str, path: str, payload: dict | None = None) -> httpx.Response:
        if self.server is None:
            return self._in_process(method, path, payload)
        with httpx.Client(base_url=self.server, timeout=600.0) as client:
            response = client.request(method, path, json=payload)
        response.raise_for_status()
        return response

    def _in_process(self, method: str, path: str, payload: dict | None) -> httpx.Response:
        from .service import app

        async def call() -> httpx.Response:
            transport = httpx.ASGITransport(app=app)
            async with httpx.AsyncClient(
                transport=transport, base_url="http://service", timeout=None
            ) as client:
                return await client.request(method, path, json=payload)

        response = asyncio.run(call())
        response.raise_for_status()
        return response


def load_config_file(path: str) -> dict:
    """Read a config file: a JSON object or flat ``key=value`` lines."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.strip()
    if stripped.startswith(("{", "[")):
        loaded = json.loads(stripped)
        if not isinstance(loaded, dict):
            raise ValueError(f"config file {path} must hold a JSON object")
        return loaded
    entries: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config file {path} line {lineno}: expected key=value")
        key = key.strip().replace("-", "_")
        value = value.strip()
        try:
            entries[key] = json.loads(value)
        except json.JSONDecodeError:
            entries[key] = value
    return entries


def parse_betas(text: str) -> list[float]:
    """Parse ``--betas``: a comma list or an inclusive ``start:step:stop`` range."""
    text = str(text).strip()
    if not text:
        raise ValueError("empty betas")
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be start:step:stop, got {text!r}")
        start, step, stop = (float(part) for part in parts)
        if step <= 0:
            raise ValueError(f"range step must be > 0, got {step}")
        if stop < start:
            raise ValueError(f"range stop {stop} is below start {start}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    return [float(part) for part in text.split(",")]


def _destination(path: str) -> str:
    if path == "-" or os.path.isabs(path):
        return path
    base = os.environ.get(OUTPUT_DIR_VAR)
    if not base:
        return path
    os.makedirs(base, exist_ok=True)
    return os.path.join(base, path)


class _Resolver:
    """Merges flag values, config-file values, and defaults, flags first."""

    def __init__(self, parser: argparse.ArgumentParser, args: argparse.Namespace, defaults: dict):
        self.parser = parser
        self.args = args
        self.defaults = defaults
        if args.config is None:
            self.file_values = {}
        else:
            try:
                self.file_values = load_config_file(args.config)
            except (OSError, ValueError, json.JSONDecodeError) as exc:
                parser.error(f"--config: {exc}")

    def get(self, key: str):
        flag_value = getattr(self.args, key, None)
        if flag_value is not None:
            return flag_value
        if key in self.file_values:
            return self.file_values[key]
        if key in self.defaults:
            return self.defaults[key]
        self.parser.error(f"--{key.replace('_', '-')} is required")

    def betas(self) -> list[float]:
        try:
            return parse_betas(self.get("betas"))
        except ValueError as exc:
            self.parser.error(f"--betas: {exc}")

    def solvers(self) -> list[str]:
        raw = self.get("solvers")
        names = raw if isinstance(raw, list) else [s.strip() for s in str(raw).split(",")]
        return [name for name in names if name]

    def mdp_payload(self) -> dict:
        return {
            "p": self.get("p"),
            "q": self.get("q"),
            "min_offset": self.get("min_offset"),
            "max_offset": self.get("max_offset"),
            "beta": self.get("beta"),
            "gamma": self.get("gamma"),
        }

    def run_payload(self) -> dict:
        return {
            "min_offset": self.get("min_offset"),
            "max_offset": self.get("max_offset"),
            "gamma": self.get("gamma"),
            "betas": self.betas(),
            "epsilon": self.get("epsilon"),
            "instances": self.get("instances"),
            "seed": self.get("seed"),
            "rule": self.get("rule"),
            "solvers": self.solvers(),
            "s0": self.get("s0"),
        }


def parse_policy(text: str) -> dict:
    """Parse ``--policy``: never, always, optimal, or threshold:k1,k2."""
    value = str(text).strip()
    if value in ("never", "always", "optimal"):
        return {"kind": value}
    if value.startswith("threshold:"):
        body = value[len("threshold:"):]
        parts = body.split(",")
        if len(parts) != 2:
            raise ValueError(f"threshold policy needs k1,k2, got {body!r}")
        return {"kind": "threshold", "k1": int(parts[0]), "k2": int(parts[1])}
    raise ValueError(
        f"unknown policy {value!r}; expected never, always, optimal, or threshold:k1,k2"
    )


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--server", help="base URL of a running service (default: in-process)")
    parser.add_argument("--config", help="config file: key=value lines or a JSON object")


def _add_mdp_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=float, help="probability the offset moves up")
    parser.add_argument("--q", type=float, help="probability the offset moves down")
    parser.add_argument("-M", "--min-offset", type=int, dest="min_offset")
    parser.add_argument("-N", "--max-offset", type=int, dest="max_offset")
    parser.add_argument("--beta", type=float, help="per-slot transmission cost")
    parser.add_argument("--gamma", type=float, help="discount factor in (0, 1)")


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-M", "--min-offset", type=int, dest="min_offset")
    parser.add_argument("-N", "--max-offset", type=int, dest="max_offset")
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--betas", help="comma list or start:step:stop range")
    parser.add_argument("--epsilon", type=float, help="value-iteration tolerance")
    parser.add_argument("--instances", type=int)
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--rule", help="instance generation rule")
    parser.add_argument("--solvers", help="comma list of solvers to run")
    parser.add_argument("--s0", type=int, help="offset whose value is reported")
    parser.add_argument("-o", "--output", help="output path or - for stdout")
    parser.add_argument("--format", choices=("csv", "json"), dest="format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="migmdp",
        description="Solvers and benchmarks for a service-migration MDP.",
        epilog=f"Set {OUTPUT_DIR_VAR} to place relative output paths under a directory.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="solve one instance and print thresholds + values")
    _add_common(solve)
    _add_mdp_flags(solve)
    solve.set_defaults(handler=_cmd_solve)

    compare = commands.add_parser("compare", help="run selected solvers over random instances")
    _add_common(compare)
    _add_run_flags(compare)
    compare.set_defaults(handler=_cmd_compare)

    sweep = commands.add_parser("sweep", help="compare plus per-beta summary aggregates")
    _add_common(sweep)
    _add_run_flags(sweep)
    sweep.add_argument("--summary-output", dest="summary_output",
                       help="summary path or - for stdout")
    sweep.set_defaults(handler=_cmd_sweep)

    simulate = commands.add_parser("simulate", help="Monte-Carlo check of a named policy")
    _add_common(simulate)
    _add_mdp_flags(simulate)
    simulate.add_argument("--policy", help="never, always, optimal, or threshold:k1,k2")
    simulate.add_argument("--runs", type=int)
    simulate.add_argument("--s0", type=int)
    simulate.add_argument("--tol", type=float, help="truncation tolerance")
    simulate.add_argument("--seed", type=int)
    simulate.set_defaults(handler=_cmd_simulate)

    oracle = commands.add_parser("oracle-check", help="cross-validate solvers against oracles")
    _add_common(oracle)
    oracle.add_argument("-M", "--min-offset", type=int, dest="min_offset")
    oracle.add_argument("-N", "--max-offset", type=int, dest="max_offset")
    oracle.add_argument("--instances", type=int)
    oracle.add_argument("--seed", type=int)
    oracle.add_argument("--epsilon", type=float)
    oracle.set_defaults(handler=_cmd_oracle_check)

    serve = commands.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.set_defaults(handler=_cmd_serve)

    return parser


def _cmd_solve(parser, args) -> int:
    resolver = _Resolver(parser, args, _MDP_DEFAULTS)
    payload = {"mdp": resolver.mdp_payload()}
    body = ServiceClient(args.server).request("POST", "/solve", payload).json()
    print(f"k1 = {body['k1']}")
    print(f"k2 = {body['k2']}")
    print(f"outer_iterations = {body['outer_iterations']}")
    print(f"linear_solves = {body['linear_solves']}")
    print("s,v")
    for s, v in zip(body["states"], body["values"]):
        print(f"{s},{_g(v)}")
    return 0


def _cmd_compare(parser, args) -> int:
    resolver = _Resolver(parser, args, _RUN_DEFAULTS)
    payload = resolver.run_payload()
    fmt = resolver.get("format")
    destination = _destination(resolver.get("output"))
    body = ServiceClient(args.server).request("POST", "/compare", payload).json()
    write_result_rows(body["rows"], fmt, destination)
    return 0


def _cmd_sweep(parser, args) -> int:
    resolver = _Resolver(parser, args, {**_RUN_DEFAULTS, "summary_output": "-"})
    payload = resolver.run_payload()
    fmt = resolver.get("format")
    destination = _destination(resolver.get("output"))
    summary_destination = _destination(resolver.get("summary_output"))
    body = ServiceClient(args.server).request("POST", "/sweep", payload).json()
    write_result_rows(body["rows"], fmt, destination)
    write_summary_rows(body["summary"], fmt, summary_destination)
    return 0


def _cmd_simulate(parser, args) -> int:
    resolver = _Resolver(parser, args, {**_MDP_DEFAULTS, **_SIMULATE_DEFAULTS})
    try:
        policy = parse_policy(resolver.get("policy"))
    except ValueError as exc:
        parser.error(f"--policy: {exc}")
    payload = {
        "mdp": resolver.mdp_payload(),
        "policy": policy,
        "runs": resolver.get("runs"),
        "s0": resolver.get("s0"),
        "tol": resolver.get("tol"),
        "seed": resolver.get("seed"),
    }
    body = ServiceClient(args.server).request("POST", "/simulate", payload).json()
    for key in ("mean", "std_err", "analytic", "abs_error"):
        print(f"{key} = {_g(body[key])}")
    print(f"runs = {body['runs']}")
    print(f"horizon = {body['horizon']}")
    return 0


def _cmd_oracle_check(parser, args) -> int:
    resolver = _Resolver(parser, args, _ORACLE_DEFAULTS)
    payload = {
        "min_offset": resolver.get("min_offset"),
        "max_offset": resolver.get("max_offset"),
        "instances": resolver.get("instances"),
        "seed": resolver.get("seed"),
        "epsilon": resolver.get("epsilon"),
    }
    body = ServiceClient(args.server).request("POST", "/oracle-check", payload).json()
    for check in body["checks"]:
        status = "PASS" if check["passed"] else "FAIL"
        print(f"{status} {check['name']}: {check['detail']}")
    return 0 if body["passed"] else 1


def _cmd_serve(parser, args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(parser, args)
    except httpx.HTTPStatusError as exc:
        try:
            detail = exc.response.json().get("detail", exc.response.text)
        except ValueError:
            detail = exc.response.text
        print(f"error: {detail}", file=sys.stderr)
        return 2 if exc.response.status_code in (400, 422) else 1
    except httpx.HTTPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
