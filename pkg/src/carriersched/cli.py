"""Command-line interface.

Subcommands: gen (instance corpora), solve (one instance or a JSONL
batch), validate (schedule against instance), bench (scheduler comparison
with CSV/JSON reports), serve (HTTP schedule service). Exit codes:
0 success, 1 usage error, 2 infeasible input / failed or invalid schedule,
3 internal error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bench import csv_rows, run_benchmark
from .core import validate_schedule
from .errors import (BudgetExceededError, InfeasibleInstanceError, ParseError,
                     ScheduleFailureError, SchedulingError, SolverTimeoutError)
from .exact import SolverBudget, solve_optimal
from .generate import GeneratorConfig, GraphModel, generate_instance
from .gnn import InferencePolicy, RepairMode, schedule_with_gnn
from .heuristic import solve_heuristic
from .jsonio import emit_instance, emit_schedule, parse_instance, parse_schedule
from .weights import load_weights_file

WEIGHTS_ENV = "CARRIERSCHED_WEIGHTS"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="carriersched",
                     description="Carrier scheduling for backscatter "
                                 "IoT networks")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a JSONL instance corpus")
    gen.add_argument("--nodes", nargs=2, type=int, metavar=("MIN", "MAX"),
                     default=[2, 10])
    gen.add_argument("--tags", nargs=2, type=int, metavar=("MIN", "MAX"),
                     default=[1, 14])
    gen.add_argument("--graph-model", choices=[m.value for m in GraphModel],
                     default=GraphModel.RANDOM_GEOMETRIC.value)
    gen.add_argument("--model-param", type=float, default=0.6,
                     help="radius (geometric) or edge probability (ER)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--out", default="-", help="output path or - for stdout")

    solve = sub.add_parser("solve", help="schedule one instance or a batch")
    src = solve.add_mutually_exclusive_group(required=True)
    src.add_argument("--instance", help="instance JSON path or - for stdin")
    src.add_argument("--instances", help="JSONL corpus path (batch mode)")
    solve.add_argument("--scheduler", choices=["optimal", "heuristic", "gnn"],
                       default="heuristic")
    solve.add_argument("--policy", choices=[m.value for m in RepairMode],
                       default=RepairMode.GREEDY_REPAIR.value)
    solve.add_argument("--weights", default=None,
                       help=f"weight file (default ${WEIGHTS_ENV})")
    solve.add_argument("--max-nodes", type=int, default=10,
                       help="exact-solver size cap")
    solve.add_argument("--time-limit", type=float, default=60.0,
                       help="exact-solver time limit in seconds")
    solve.add_argument("--out", default="-")

    val = sub.add_parser("validate", help="validate a schedule")
    val.add_argument("--instance", required=True)
    val.add_argument("--schedule", required=True)

    bench = sub.add_parser("bench", help="compare schedulers over a corpus")
    bench.add_argument("--instances", required=True)
    bench.add_argument("--schedulers", required=True,
                       help="comma-separated subset of optimal,heuristic,gnn")
    bench.add_argument("--reference", required=True)
    bench.add_argument("--policy", choices=[m.value for m in RepairMode],
                       default=RepairMode.GREEDY_REPAIR.value)
    bench.add_argument("--weights", default=None)
    bench.add_argument("--max-nodes", type=int, default=10)
    bench.add_argument("--time-limit", type=float, default=60.0)
    bench.add_argument("--csv", default=None, help="per-run CSV output path")
    bench.add_argument("--json", default=None, help="report JSON output path")

    serve = sub.add_parser("serve", help="run the schedule-request service")
    serve.add_argument("--bind", default="127.0.0.1:8371",
                       help="host:port to listen on")
    serve.add_argument("--weights", default=None)
    serve.add_argument("--policy", choices=[m.value for m in RepairMode],
                       default=RepairMode.GREEDY_REPAIR.value)
    serve.add_argument("--max-nodes", type=int, default=10)
    serve.add_argument("--time-limit", type=float, default=60.0)
    return parser


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _write(path: str, data: bytes):
    if path == "-":
        sys.stdout.buffer.write(data)
        if not data.endswith(b"\n"):
            sys.stdout.buffer.write(b"\n")
        sys.stdout.buffer.flush()
    else:
        with open(path, "wb") as fh:
            fh.write(data)


def _load_model(args):
    path = args.weights or os.environ.get(WEIGHTS_ENV)
    if not path:
        raise ValueError(
            f"gnn scheduler needs --weights or ${WEIGHTS_ENV}")
    return load_weights_file(path)


def _make_scheduler(name: str, args, model_cache: dict):
    budget = SolverBudget(max_nodes=args.max_nodes,
                          time_limit=args.time_limit)
    if name == "optimal":
        return lambda inst: solve_optimal(inst, budget)
    if name == "heuristic":
        return lambda inst: solve_heuristic(inst)
    if name == "gnn":
        if "model" not in model_cache:
            model_cache["model"] = _load_model(args)
        policy = InferencePolicy(repair=RepairMode(args.policy))
        model = model_cache["model"]
        return lambda inst: schedule_with_gnn(model, inst, policy)
    raise ValueError(f"unknown scheduler {name!r}")


def _cmd_gen(args) -> int:
    lines = []
    for i in range(args.count):
        config = GeneratorConfig(
            node_range=tuple(args.nodes), tag_range=tuple(args.tags),
            graph_model=GraphModel(args.graph_model),
            model_param=args.model_param, seed=args.seed + i)
        lines.append(emit_instance(generate_instance(config)))
    _write(args.out, b"\n".join(lines) + b"\n")
    return EXIT_OK


def _cmd_solve(args) -> int:
    cache: dict = {}
    scheduler = _make_scheduler(args.scheduler, args, cache)
    if args.instance is not None:
        instance = parse_instance(_read(args.instance))
        schedule = scheduler(instance)
        _write(args.out, emit_schedule(instance, schedule))
        return EXIT_OK
    failures = 0
    out_lines = []
    for line in _read(args.instances).splitlines():
        if not line.strip():
            continue
        instance = parse_instance(line)
        try:
            schedule = scheduler(instance)
            out_lines.append(emit_schedule(instance, schedule))
        except (InfeasibleInstanceError, ScheduleFailureError,
                SolverTimeoutError, BudgetExceededError) as exc:
            failures += 1
            out_lines.append(json.dumps(
                {"error": type(exc).__name__, "detail": str(exc)}).encode())
    _write(args.out, b"\n".join(out_lines) + b"\n")
    return EXIT_FAILURE if failures else EXIT_OK


def _cmd_validate(args) -> int:
    instance = parse_instance(_read(args.instance))
    schedule = parse_schedule(_read(args.schedule), instance)
    report = validate_schedule(instance, schedule)
    doc = {
        "valid": report.valid,
        "violations": [{"slot": v.slot, "kind": v.kind.value,
                        "subjects": list(v.subjects)}
                       for v in report.violations],
        "never_interrogated": sorted(report.never_interrogated),
        "multiply_interrogated": sorted(report.multiply_interrogated),
    }
    print(json.dumps(doc, indent=2))
    return EXIT_OK if report.valid else EXIT_FAILURE


def _cmd_bench(args) -> int:
    instances = [parse_instance(line)
                 for line in _read(args.instances).splitlines()
                 if line.strip()]
    names = [s.strip() for s in args.schedulers.split(",") if s.strip()]
    cache: dict = {}
    schedulers = {name: _make_scheduler(name, args, cache) for name in names}
    report = run_benchmark(instances, schedulers, args.reference,
                           metadata={"policy": args.policy})
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("\n".join(csv_rows(report)) + "\n")
    doc = report.to_json()
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
    summary = {"pi_percent": doc["pi_percent"],
               "reference": doc["reference"],
               "sign_convention": doc["sign_convention"]}
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def _cmd_serve(args) -> int:
    from .service import make_server
    host, _, port = args.bind.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"--bind expects host:port, got {args.bind!r}")
    model = None
    path = args.weights or os.environ.get(WEIGHTS_ENV)
    if path:
        model = load_weights_file(path)
    policy = InferencePolicy(repair=RepairMode(args.policy))
    budget = SolverBudget(max_nodes=args.max_nodes,
                          time_limit=args.time_limit)
    server = make_server(host, int(port), model, policy, budget)
    print(f"serving on http://{host}:{server.server_address[1]}/schedule",
          file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handlers = {"gen": _cmd_gen, "solve": _cmd_solve, "validate": _cmd_validate,
                "bench": _cmd_bench, "serve": _cmd_serve}
    try:
        return handlers[args.command](args)
    except (ParseError, InfeasibleInstanceError, ScheduleFailureError,
            SolverTimeoutError, BudgetExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchedulingError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
