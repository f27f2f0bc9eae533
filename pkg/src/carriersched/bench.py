"""Batch benchmark harness comparing schedulers over an instance corpus.

Every scheduler runs on every instance; outputs are validated (an invalid
schedule is a hard benchmark error, never silently scored). Completion
rate is computed per scheduler over the full corpus, while paired deltas
against the reference scheduler use only instances where both runs
succeeded. All delta metrics follow the package-wide convention: positive
means the candidate saves resources versus the reference.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .core import ProblemInstance, Schedule, schedule_cost, validate_schedule
from .errors import (BenchmarkError, InfeasibleInstanceError,
                     ScheduleFailureError, SolverTimeoutError)
from .metrics import RadioParams, FIREFLY, completion_rate, energy_saved_pct

SIGN_CONVENTION = "positive = candidate saves resources vs reference"
PERCENTILES = (1, 25, 50, 75, 95, 99)

SchedulerFn = Callable[[ProblemInstance], Schedule]


@dataclass(frozen=True)
class SchedulerRun:
    instance_id: int
    nodes: int
    tags: int
    scheduler: str
    success: bool
    carriers: int | None
    length: int | None
    objective: int | None
    runtime_ms: float


@dataclass(frozen=True)
class Summary:
    count: int
    mean: float
    std_err: float
    percentiles: dict[int, float]

    @classmethod
    def of(cls, values: Sequence[float]) -> "Summary":
        arr = np.asarray(values, dtype=np.float64)
        std_err = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
        return cls(count=int(arr.size), mean=float(arr.mean()),
                   std_err=std_err,
                   percentiles={p: float(np.percentile(arr, p))
                                for p in PERCENTILES})


@dataclass
class BenchmarkReport:
    reference: str
    sign_convention: str
    metadata: dict
    runs: list[SchedulerRun]
    pi: dict[str, float]
    # scheduler -> metric -> Summary, over the success intersection with
    # the reference; "cells" adds a per-(N, T) breakdown
    deltas: dict[str, dict[str, Summary]]
    cells: dict[str, dict[tuple[int, int], dict[str, Summary]]]
    runtime_ms: dict[str, Summary] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "reference": self.reference,
            "sign_convention": self.sign_convention,
            "metadata": self.metadata,
            "pi_percent": self.pi,
            "deltas": {
                sched: {metric: _summary_json(s) for metric, s in metrics.items()}
                for sched, metrics in self.deltas.items()},
            "cells": {
                sched: [{"nodes": n, "tags": t,
                         "metrics": {m: _summary_json(s)
                                     for m, s in metrics.items()}}
                        for (n, t), metrics in sorted(cells.items())]
                for sched, cells in self.cells.items()},
            "runtime_ms": {sched: _summary_json(s)
                           for sched, s in self.runtime_ms.items()},
            "runs": [vars(r) for r in self.runs],
        }


def _summary_json(s: Summary) -> dict:
    return {"count": s.count, "mean": s.mean, "std_err": s.std_err,
            "percentiles": {str(p): v for p, v in s.percentiles.items()}}


CSV_HEADER = ("instance_id,N,T,scheduler,success,C,L,objective,runtime_ms")


def csv_rows(report: BenchmarkReport) -> list[str]:
    rows = [CSV_HEADER]
    for r in report.runs:
        rows.append(",".join([
            str(r.instance_id), str(r.nodes), str(r.tags), r.scheduler,
            "1" if r.success else "0",
            "" if r.carriers is None else str(r.carriers),
            "" if r.length is None else str(r.length),
            "" if r.objective is None else str(r.objective),
            f"{r.runtime_ms:.3f}",
        ]))
    return rows


def run_benchmark(instances: Sequence[ProblemInstance],
                  schedulers: Mapping[str, SchedulerFn],
                  reference: str,
                  radio: RadioParams = FIREFLY,
                  metadata: dict | None = None) -> BenchmarkReport:
    if reference not in schedulers:
        raise ValueError(f"reference scheduler {reference!r} not in schedulers")
    if not instances:
        raise ValueError("empty instance corpus")

    runs: list[SchedulerRun] = []
    outcome: dict[tuple[str, int], SchedulerRun] = {}
    for name, fn in schedulers.items():
        for idx, inst in enumerate(instances):
            start = time.perf_counter()
            schedule = None
            try:
                schedule = fn(inst)
            except (InfeasibleInstanceError, ScheduleFailureError,
                    SolverTimeoutError):
                pass
            elapsed_ms = (time.perf_counter() - start) * 1e3
            if schedule is None:
                run = SchedulerRun(idx, inst.node_count, inst.tag_count,
                                   name, False, None, None, None, elapsed_ms)
            else:
                report = validate_schedule(inst, schedule)
                if not report.valid:
                    raise BenchmarkError(
                        f"scheduler {name!r} emitted an invalid schedule for "
                        f"instance {idx}: {report.violations[:3]}")
                cost = schedule_cost(inst, schedule)
                run = SchedulerRun(idx, inst.node_count, inst.tag_count,
                                   name, True, cost.carriers, cost.length,
                                   cost.objective, elapsed_ms)
            runs.append(run)
            outcome[(name, idx)] = run

    pi = {name: completion_rate([outcome[(name, i)].success
                                 for i in range(len(instances))])
          for name in schedulers}
    runtime = {name: Summary.of([outcome[(name, i)].runtime_ms
                                 for i in range(len(instances))])
               for name in schedulers}

    deltas: dict[str, dict[str, Summary]] = {}
    cells: dict[str, dict[tuple[int, int], dict[str, Summary]]] = {}
    for name in schedulers:
        values: dict[str, list[float]] = {
            "carriers_saved": [], "timeslots_saved": [],
            "carriers_saved_pct": [], "energy_saved_pct": []}
        per_cell: dict[tuple[int, int], dict[str, list[float]]] = {}
        for idx, inst in enumerate(instances):
            ref = outcome[(reference, idx)]
            cand = outcome[(name, idx)]
            if not (ref.success and cand.success):
                continue
            row = {
                "carriers_saved": float(ref.carriers - cand.carriers),
                "timeslots_saved": float(ref.length - cand.length),
                "carriers_saved_pct":
                    100.0 * (ref.carriers - cand.carriers) / ref.carriers,
                "energy_saved_pct": energy_saved_pct(
                    ref.carriers, cand.carriers, inst.tag_count, radio),
            }
            cell = per_cell.setdefault(
                (inst.node_count, inst.tag_count),
                {k: [] for k in values})
            for k, v in row.items():
                values[k].append(v)
                cell[k].append(v)
        deltas[name] = {k: Summary.of(v) for k, v in values.items() if v}
        cells[name] = {key: {k: Summary.of(v) for k, v in m.items() if v}
                       for key, m in per_cell.items()}

    return BenchmarkReport(
        reference=reference, sign_convention=SIGN_CONVENTION,
        metadata=dict(metadata or {}), runs=runs, pi=pi,
        deltas=deltas, cells=cells, runtime_ms=runtime)
