"""Deployment-style evaluation through the scheduler package's CLI.

Held-out instances are generated and benchmarked by the inference side
(`bench` subcommand with the exported weight file), so these numbers
measure the weights as production consumers see them, not the trainer's
in-process forward.
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from .dataset import run_scheduler_cli

HELDOUT_SEED = 1_000_000  # far away from any training corpus seed


def _mean_objective(runs, scheduler, success_ids):
    values = [r["objective"] for r in runs
              if r["scheduler"] == scheduler and r["instance_id"] in success_ids]
    return sum(values) / len(values)


def bench_gnn_vs_heuristic(weights: Path, count: int, seed: int,
                           node_range, tag_range, model_param: float,
                           policy: str = "repair") -> dict:
    """Run the scheduler CLI bench; distill completion rates and objectives."""
    with tempfile.TemporaryDirectory() as tmp:
        corpus = Path(tmp) / "corpus.jsonl"
        report_path = Path(tmp) / "report.json"
        run_scheduler_cli(
            "gen", "--nodes", str(node_range[0]), str(node_range[1]),
            "--tags", str(tag_range[0]), str(tag_range[1]),
            "--model-param", str(model_param),
            "--seed", str(seed), "--count", str(count),
            "--out", str(corpus))
        run_scheduler_cli(
            "bench", "--instances", str(corpus),
            "--schedulers", "gnn,heuristic", "--reference", "heuristic",
            "--policy", policy, "--weights", str(weights),
            "--json", str(report_path))
        report = json.loads(report_path.read_text())
    runs = report["runs"]
    gnn_ok = {r["instance_id"] for r in runs
              if r["scheduler"] == "gnn" and r["success"]}
    heur_ok = {r["instance_id"] for r in runs
               if r["scheduler"] == "heuristic" and r["success"]}
    both = gnn_ok & heur_ok
    out = {
        "count": count,
        "seed": seed,
        "policy": policy,
        "node_range": list(node_range),
        "tag_range": list(tag_range),
        "pi_gnn_percent": report["pi_percent"]["gnn"],
        "pi_heuristic_percent": report["pi_percent"]["heuristic"],
        "deltas_vs_heuristic": report["deltas"].get("gnn", {}),
        "sign_convention": report["sign_convention"],
    }
    if both:
        mean_gnn = _mean_objective(runs, "gnn", both)
        mean_heur = _mean_objective(runs, "heuristic", both)
        out["mean_objective_gnn"] = mean_gnn
        out["mean_objective_heuristic"] = mean_heur
        out["objective_ratio"] = mean_gnn / mean_heur
    return out


def heldout_evaluation(weights: Path, count: int = 500,
                       seed: int = HELDOUT_SEED) -> dict:
    """Training-scale held-out set, GREEDY_REPAIR policy."""
    return bench_gnn_vs_heuristic(weights, count, seed,
                                  node_range=(2, 10), tag_range=(1, 14),
                                  model_param=0.6, policy="repair")


def trend_report(weights: Path, per_cell: int = 30) -> dict:
    """Larger unseen topologies; archived as trend data, no assertions."""
    cells = []
    for i, (n, t) in enumerate([(20, 20), (20, 40),
                                (60, 60), (60, 120),
                                (100, 100), (100, 200)]):
        radius = 0.45 if n <= 20 else (0.28 if n <= 60 else 0.22)
        cells.append(bench_gnn_vs_heuristic(
            weights, per_cell, HELDOUT_SEED + 10_000 * (i + 1),
            node_range=(n, n), tag_range=(t, t), model_param=radius,
            policy="repair"))
    return {"cells": cells, "note": "trend data vs the greedy baseline; "
            "not acceptance-asserted"}
