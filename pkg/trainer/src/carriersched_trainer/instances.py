"""Instance/schedule JSONL consumption and input-feature construction.

The trainer talks to the scheduler package only over its wire formats, so
this module re-implements the instance parsing and the node-feature
definitions from scratch: hosted pending-tag count, node id scaled by
N-1, minimum pending tag id scaled by the instance's maximum tag id
(0 when the node hosts none), plus the normalized-degree column.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

ROLE_CARRIER = 0
ROLE_QUERY = 1
ROLE_IDLE = 2


@dataclass(frozen=True)
class Instance:
    node_count: int
    edges: tuple[tuple[int, int], ...]
    tags: tuple[tuple[int, int], ...]  # (tag_id, host) sorted by id

    @property
    def tag_count(self) -> int:
        return len(self.tags)

    def neighbor_lists(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.node_count)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return [sorted(a) for a in adj]


def parse_instance(line: str | bytes) -> Instance:
    doc = json.loads(line)
    edges = tuple((min(u, v), max(u, v)) for u, v in doc["edges"])
    tags = tuple(sorted((t["id"], t["host"]) for t in doc["tags"]))
    return Instance(int(doc["nodes"]), edges, tags)


def parse_schedule_slots(line: str | bytes) -> list[list[tuple[int, int, int]]]:
    """Slots as lists of (host, tag, carrier) records; [] on an error line."""
    doc = json.loads(line)
    if "error" in doc:
        return []
    return [[(r["node"], r["tag"], r["carrier"]) for r in slot["interrogations"]]
            for slot in doc["slots"]]


def degree_pe(instance: Instance) -> np.ndarray:
    deg = np.zeros(instance.node_count, dtype=np.float64)
    for u, v in instance.edges:
        deg[u] += 1
        deg[v] += 1
    top = deg.max()
    return deg / top if top > 0 else deg


def build_features(instance: Instance, remaining: set[int]) -> np.ndarray:
    """N x 4 feature matrix (hosted, node id, min tag id, degree PE)."""
    n = instance.node_count
    hosted = np.zeros(n, dtype=np.float64)
    min_tag = np.zeros(n, dtype=np.float64)
    for tag_id, host in sorted(instance.tags, reverse=True):
        if tag_id in remaining:
            hosted[host] += 1
            min_tag[host] = float(tag_id)
    node_ids = np.arange(n, dtype=np.float64)
    if n > 1:
        node_ids /= n - 1
    min_tag /= float(instance.tags[-1][0])
    return np.column_stack([hosted, node_ids, min_tag, degree_pe(instance)])


def roles_from_slot(instance: Instance,
                    records: list[tuple[int, int, int]]) -> np.ndarray:
    roles = np.full(instance.node_count, ROLE_IDLE, dtype=np.int64)
    for host, _tag, carrier in records:
        roles[host] = ROLE_QUERY
        roles[carrier] = ROLE_CARRIER
    return roles


def closed_edge_arrays(instance: Instance) -> tuple[np.ndarray, np.ndarray]:
    """Directed (src, dst) pairs, both directions plus self-loops."""
    src = list(range(instance.node_count))
    dst = list(range(instance.node_count))
    for u, v in instance.edges:
        src += [u, v]
        dst += [v, u]
    return np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64)
