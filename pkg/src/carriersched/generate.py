"""Random problem-instance generation.

Instances follow the dataset protocol: node and tag counts drawn uniformly
from configured ranges, topologies re-sampled until connected, tags
assigned to uniformly random hosts. Everything is driven by one seeded
PCG64 stream, so a config reproduces its instance bit-exactly.

Two graph families are supported. Random geometric graphs (points in the
unit square, edge iff within radius) are the default because carrier
provisioning is signal-strength- and therefore distance-driven;
Erdos-Renyi is kept for ablation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import ProblemInstance, Topology
from .errors import GenerationError

MAX_CONNECTIVITY_RETRIES = 5000


class GraphModel(enum.Enum):
    RANDOM_GEOMETRIC = "random_geometric"
    ERDOS_RENYI = "erdos_renyi"


@dataclass(frozen=True)
class GeneratorConfig:
    node_range: tuple[int, int] = (2, 10)
    tag_range: tuple[int, int] = (1, 14)
    graph_model: GraphModel = GraphModel.RANDOM_GEOMETRIC
    model_param: float = 0.6  # radius (geometric) or edge probability (ER)
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.node_range
        if not (1 <= lo <= hi):
            raise ValueError(f"empty node_range {self.node_range}")
        lo, hi = self.tag_range
        if not (1 <= lo <= hi):
            raise ValueError(f"empty tag_range {self.tag_range}")
        if self.model_param <= 0:
            raise ValueError("model_param must be positive")


def _sample_edges(rng: np.random.Generator, n: int, model: GraphModel,
                  param: float) -> list[tuple[int, int]]:
    if n == 1:
        return []
    if model is GraphModel.RANDOM_GEOMETRIC:
        pts = rng.random((n, 2))
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff ** 2).sum(axis=2))
        iu, ju = np.triu_indices(n, k=1)
        mask = dist[iu, ju] <= param
        return list(zip(iu[mask].tolist(), ju[mask].tolist()))
    draws = rng.random(n * (n - 1) // 2)
    iu, ju = np.triu_indices(n, k=1)
    mask = draws < param
    return list(zip(iu[mask].tolist(), ju[mask].tolist()))


def _connected(n: int, edges: list[tuple[int, int]]) -> bool:
    if n == 1:
        return True
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = [False] * n
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                stack.append(v)
    return count == n


def generate_instance(config: GeneratorConfig) -> ProblemInstance:
    """One connected instance, deterministic in the config seed.

    Raises GenerationError when connectivity is not reached within the
    retry budget (e.g. a radius far below the connectivity threshold).
    """
    rng = np.random.default_rng(config.seed)
    n = int(rng.integers(config.node_range[0], config.node_range[1] + 1))
    edges = None
    for _ in range(MAX_CONNECTIVITY_RETRIES):
        candidate = _sample_edges(rng, n, config.graph_model, config.model_param)
        if _connected(n, candidate):
            edges = candidate
            break
    if edges is None:
        raise GenerationError(
            f"no connected graph with N={n} after "
            f"{MAX_CONNECTIVITY_RETRIES} attempts "
            f"(model={config.graph_model.value}, param={config.model_param})")
    topology = Topology(n, edges)
    t = int(rng.integers(config.tag_range[0], config.tag_range[1] + 1))
    hosts = rng.integers(0, n, size=t)
    tags = [(k + 1, int(hosts[k])) for k in range(t)]
    return ProblemInstance(topology, tags)


def generate_corpus(config: GeneratorConfig, count: int) -> list[ProblemInstance]:
    """count instances from consecutive seeds config.seed .. config.seed+count-1."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    for i in range(count):
        sub = GeneratorConfig(config.node_range, config.tag_range,
                              config.graph_model, config.model_param,
                              seed=config.seed + i)
        out.append(generate_instance(sub))
    return out
