"""Polynomial-time greedy scheduler (graph-coloring-flavored baseline).

Slots are built one at a time. Within a slot the carrier candidate that
covers the most pending tags is picked repeatedly (ties to the lowest node
id), where a pending tag counts as coverable only if its host neighbors
the candidate, is not yet interrogating, and has no other active carrier
neighbor; candidates that would interfere with an interrogation already
scheduled this slot are banned. Each covered host queries its lowest-id
pending tag, so hosts with several tags re-enter the pending pool for
later slots. A slot closes when no candidate adds coverage.

Worst case O(T * (N + E)) picks overall: every pick covers at least one
pending tag.
"""

from __future__ import annotations

import numpy as np

from . import accel
from .core import ProblemInstance, Schedule, Timeslot
from .errors import InfeasibleInstanceError


def _check_feasible(instance: ProblemInstance):
    for tag_id, host in instance.tags:
        if len(instance.topology.neighbors[host]) == 0:
            raise InfeasibleInstanceError(tag_id)


def _host_tag_csr(instance: ProblemInstance):
    """Per-host tag indices (ascending tag id) in CSR form."""
    n = instance.node_count
    counts = np.zeros(n, dtype=np.int64)
    for _, h in instance.tags:
        counts[h] += 1
    start = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=start[1:])
    fill = start[:-1].copy()
    order = np.empty(instance.tag_count, dtype=np.int64)
    for idx, (_, h) in enumerate(instance.tags):  # tags already sorted by id
        order[fill[h]] = idx
        fill[h] += 1
    return start, order


def solve_heuristic(instance: ProblemInstance) -> Schedule:
    """Valid schedule in polynomial time; deterministic."""
    _check_feasible(instance)
    indptr, indices = instance.topology.adjacency_csr()
    tag_host = np.array([h for _, h in instance.tags], dtype=np.int64)
    host_tag_start, host_tag_list = _host_tag_csr(instance)
    slot_of, carrier_of, n_slots = accel.greedy_schedule(
        indptr, indices, tag_host, host_tag_start, host_tag_list)
    if n_slots < 0:
        # unreachable after the feasibility precheck; kept as a hard stop
        raise InfeasibleInstanceError(instance.tags[0][0],
                                      "greedy pass made no progress")
    slots = []
    for s in range(n_slots):
        records = [(int(tag_host[i]), instance.tags[i][0], int(carrier_of[i]))
                   for i in range(instance.tag_count) if slot_of[i] == s]
        slots.append(Timeslot.from_interrogations(instance.node_count, records))
    return Schedule(slots)


def greedy_slot(instance: ProblemInstance,
                remaining_tags: set[int]) -> Timeslot | None:
    """One greedy slot over an arbitrary pending subset (repair fallback).

    Same selection rule as solve_heuristic, restricted to remaining_tags.
    Returns None when nothing can be scheduled (no pending tag has a
    usable neighbor), which for connected topologies only happens with
    an empty remaining set or N == 1.
    """
    topo = instance.topology
    n = topo.node_count
    pending: dict[int, list[int]] = {}
    for tag_id, host in instance.tags:
        if tag_id in remaining_tags:
            pending.setdefault(host, []).append(tag_id)
    for tags in pending.values():
        tags.sort()
    interrogating: set[int] = set()
    carriers: set[int] = set()
    host_blocked: set[int] = set()
    banned: set[int] = set()
    records = []
    while True:
        best_w, best_cover = -1, []
        for w in range(n):
            if w in interrogating or w in carriers or w in banned:
                continue
            cover = [h for h in topo.neighbors[w]
                     if h in pending and pending[h]
                     and h not in interrogating
                     and h not in host_blocked and h not in carriers]
            if len(cover) > len(best_cover):
                best_w, best_cover = w, cover
        if best_w < 0 or not best_cover:
            break
        carriers.add(best_w)
        for h in best_cover:
            interrogating.add(h)
            tag = pending[h].pop(0)
            records.append((h, tag, best_w))
            banned.update(topo.neighbors[h])
        host_blocked.update(topo.neighbors[best_w])
    if not records:
        return None
    records.sort(key=lambda r: r[1])  # records kept in tag-id order
    return Timeslot.from_interrogations(n, records)
