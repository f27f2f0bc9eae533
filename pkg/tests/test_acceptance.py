"""Acceptance suite: one test per criterion, one printed line per result.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Every tolerance is pinned here; nothing is deferred.
"""

import itertools
import json
import random
import threading
import time
import urllib.request
from urllib.error import HTTPError

import numpy as np
import pytest

from carriersched.core import (ProblemInstance, Topology, schedule_cost,
                               validate_schedule)
from carriersched.errors import (InfeasibleInstanceError,
                                 ScheduleFailureError)
from carriersched.exact import solve_optimal
from carriersched.features import PeMode, build_feature_matrix
from carriersched.generate import GeneratorConfig, generate_corpus, \
    generate_instance
from carriersched.gnn import InferencePolicy, RepairMode, forward, \
    schedule_with_gnn
from carriersched.heuristic import solve_heuristic
from carriersched.jsonio import (emit_instance, emit_schedule, parse_instance,
                                 parse_schedule)
from carriersched.metrics import avg_energy_per_tag, carriers_saved, \
    completion_rate, energy_saved_pct
from carriersched.service import make_server
from carriersched.weights import GnnConfig, random_model

from conftest import training_scale_corpus
from mutations import ALL_MUTATORS
from oracle import all_connected_topologies, brute_force_best


def report(name: str, ok: bool, detail: str = ""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}"
    if detail:
        line += f" ({detail})"
    print(line)
    assert ok, line


def oracle_corpus():
    """All connected topologies N <= 4 with every placement T <= 3."""
    instances = []
    for n in (1, 2, 3, 4):
        for topo in all_connected_topologies(n):
            for t in (1, 2, 3):
                for hosts in itertools.product(range(n), repeat=t):
                    instances.append(ProblemInstance(
                        topo, [(k + 1, h) for k, h in enumerate(hosts)]))
    return instances


def random_n5_corpus():
    out = []
    for i in range(200):
        config = GeneratorConfig(node_range=(5, 5), tag_range=(1, 4),
                                 model_param=0.7, seed=90_000 + i)
        out.append(generate_instance(config))
    return out


def test_exact_solver_oracle_equivalence():
    start = time.monotonic()
    checked = infeasible = 0
    for inst in oracle_corpus() + random_n5_corpus():
        best = brute_force_best(inst)
        if best is None:
            with pytest.raises(InfeasibleInstanceError):
                solve_optimal(inst)
            infeasible += 1
            continue
        schedule = solve_optimal(inst)
        assert validate_schedule(inst, schedule).valid
        cost = schedule_cost(inst, schedule)
        assert (cost.carriers, cost.length, cost.objective) == \
            (best[3], best[4], best[0]), inst
        checked += 1
    elapsed = time.monotonic() - start
    report("exact-solver oracle equivalence", elapsed < 600,
           f"{checked} instances + {infeasible} infeasible, {elapsed:.1f}s")


def test_validator_soundness_and_completeness():
    rng = random.Random(2024)
    corpus = training_scale_corpus(120, seed=31_000)
    schedules = []
    for inst in corpus:
        for solver in (solve_heuristic, solve_optimal):
            schedule = solver(inst)
            rep = validate_schedule(inst, schedule)
            assert rep.valid, "false reject on a pristine schedule"
            schedules.append((inst, schedule))
    mutations = false_accepts = wrong_kind = 0
    while mutations < 10_000:
        inst, schedule = schedules[mutations % len(schedules)]
        mutator = ALL_MUTATORS[mutations % len(ALL_MUTATORS)]
        result = mutator(inst, schedule, rng)
        if result is None:
            mutations += 1  # inapplicable combination; try the next pair
            continue
        mutated, expected_kind = result
        rep = validate_schedule(inst, mutated)
        if rep.valid:
            false_accepts += 1
        elif expected_kind not in {v.kind for v in rep.violations}:
            wrong_kind += 1
        mutations += 1
    report("validator soundness/completeness",
           false_accepts == 0 and wrong_kind == 0,
           f"10000 mutations, {false_accepts} false accepts, "
           f"{wrong_kind} wrong kinds")


def test_heuristic_dominance_and_scale_feasibility():
    violations = 0
    for inst in oracle_corpus() + random_n5_corpus():
        best = brute_force_best(inst)
        if best is None:
            with pytest.raises(InfeasibleInstanceError):
                solve_heuristic(inst)
            continue
        schedule = solve_heuristic(inst)
        assert validate_schedule(inst, schedule).valid
        if schedule_cost(inst, schedule).objective < best[0]:
            violations += 1
    config = GeneratorConfig(node_range=(1000, 1000), tag_range=(1500, 1500),
                             model_param=0.07, seed=6101)
    big = generate_instance(config)
    start = time.monotonic()
    schedule = solve_heuristic(big)
    elapsed = time.monotonic() - start
    big_valid = validate_schedule(big, schedule).valid
    report("heuristic dominance and N=1000 feasibility",
           violations == 0 and elapsed < 60.0 and big_valid,
           f"0 dominance violations, large run {elapsed:.1f}s")


def test_c_at_least_l_everywhere():
    checked = 0
    gnn_cfg = GnnConfig(num_blocks=4, num_heads=4, hidden_dim=32)
    policy = InferencePolicy(repair=RepairMode.HEURISTIC_FALLBACK)
    for i, inst in enumerate(training_scale_corpus(150, seed=52_000)):
        for schedule in (solve_heuristic(inst),
                         schedule_with_gnn(random_model(gnn_cfg, seed=i),
                                           inst, policy)):
            cost = schedule_cost(inst, schedule)
            assert cost.carriers >= cost.length
            checked += 1
        if inst.tag_count <= 6:
            cost = schedule_cost(inst, solve_optimal(inst))
            assert cost.carriers >= cost.length
            checked += 1
    report("C >= L for every emitted schedule", True,
           f"{checked} schedules")


def test_gnn_permutation_equivariance():
    rng = np.random.default_rng(424242)
    cfg = GnnConfig()  # 12 blocks, 12 heads
    worst = 0.0
    for trial in range(100):
        inst = generate_instance(GeneratorConfig(
            node_range=(3, 20), tag_range=(1, 6), model_param=0.7,
            seed=70_000 + trial))
        n = inst.node_count
        model = random_model(cfg, seed=trial)
        perm = rng.permutation(n)
        mapping = {old: new for new, old in enumerate(perm)}
        x = rng.normal(size=(n, cfg.input_dim))
        base = forward(model, x, inst.topology)
        topo_p = Topology(n, [(mapping[u], mapping[v])
                              for u, v in inst.topology.edges])
        x_p = np.empty_like(x)
        expected = np.empty_like(base)
        for old in range(n):
            x_p[mapping[old]] = x[old]
            expected[mapping[old]] = base[old]
        got = forward(model, x_p, topo_p)
        worst = max(worst, float(np.max(np.abs(got - expected))))
    report("GNN permutation equivariance", worst <= 1e-5,
           f"max deviation {worst:.2e} over 100 triples")


def test_inference_termination_and_pi_accounting():
    cfg = GnnConfig()
    corpus = training_scale_corpus(500, seed=81_000)
    repair_outcomes = []
    for i, inst in enumerate(corpus):
        model = random_model(cfg, seed=i)
        limit = inst.tag_count + 2
        try:
            schedule = schedule_with_gnn(
                model, inst, InferencePolicy(repair=RepairMode.GREEDY_REPAIR))
            assert schedule.length <= limit
            assert validate_schedule(inst, schedule).valid
            repair_outcomes.append(True)
        except ScheduleFailureError as exc:
            assert len(exc.partial_slots) <= limit
            repair_outcomes.append(False)
    pi_repair = completion_rate(repair_outcomes)

    fallback_outcomes = []
    for i, inst in enumerate(corpus):
        model = random_model(cfg, seed=i)
        try:
            schedule = schedule_with_gnn(
                model, inst,
                InferencePolicy(repair=RepairMode.HEURISTIC_FALLBACK))
            assert validate_schedule(inst, schedule).valid
            fallback_outcomes.append(True)
        except ScheduleFailureError:
            fallback_outcomes.append(False)
    pi_fallback = completion_rate(fallback_outcomes)
    report("inference termination and completion accounting",
           pi_fallback == 100.0,
           f"repair pi={pi_repair:.1f}%, fallback pi={pi_fallback:.1f}%, "
           f"500 instances each")


def test_energy_model_and_sign_agreement():
    value = avg_energy_per_tag(9, 9)
    exact_ok = abs(value - 1.66026e-3) <= 1e-9
    rng = random.Random(5)
    sign_ok = True
    for _ in range(1000):
        c_ref = rng.randint(0, 400)
        c_cand = rng.randint(0, 400)
        t = rng.randint(1, 200)
        saved = carriers_saved(c_ref, c_cand)
        pct = energy_saved_pct(c_ref, c_cand, t)
        agrees = (pct == 0.0) if saved == 0 else ((pct > 0) == (saved > 0))
        sign_ok = sign_ok and agrees
    report("energy model and sign agreement", exact_ok and sign_ok,
           f"E(C=T)={value:.6e} J, 1000 sign triples")


def test_serialization_and_service_contract():
    corpus = oracle_corpus()
    for inst in corpus:
        assert parse_instance(emit_instance(inst)) == inst
        try:
            schedule = solve_optimal(inst)
        except InfeasibleInstanceError:
            continue
        assert parse_schedule(emit_schedule(inst, schedule), inst) == schedule

    model = random_model(GnnConfig(num_blocks=2, num_heads=2, hidden_dim=8,
                                   pe_mode=PeMode.DEGREE), seed=1)
    srv = make_server("127.0.0.1", 0, model)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"

    def post(query: str, body: bytes):
        req = urllib.request.Request(f"{base}/schedule?scheduler={query}",
                                     data=body, method="POST")
        try:
            with urllib.request.urlopen(req) as resp:
                return resp.status
        except HTTPError as exc:
            exc.read()
            return exc.code

    try:
        ok_200 = post("heuristic",
                      b'{"nodes":2,"edges":[[0,1]],'
                      b'"tags":[{"id":1,"host":0}]}') == 200
        ok_400 = post("heuristic",
                      b'{"nodes":4,"edges":[[0,1],[2,3]],'
                      b'"tags":[{"id":1,"host":0}]}') == 400
        ok_422 = post("optimal",
                      b'{"nodes":1,"edges":[],'
                      b'"tags":[{"id":1,"host":0}]}') == 422
    finally:
        srv.shutdown()
        srv.server_close()
    report("serialization round-trip and service contract",
           ok_200 and ok_400 and ok_422,
           f"{len(corpus)} round-trips, service 200/400/422")
