"""GNN inference: masked multi-head attention forward pass and the
iterative slot-by-slot scheduling loop with constraint repair.

Each block applies a node-wise feed-forward sublayer and a multi-head
graph-attention sublayer, both wrapped with additive skip connections and
layer normalization (Transformer arrangement). Attention is additive
scoring over the concatenated transformed target/source features,
softmax-normalized over each node's closed neighborhood {v} union N(v), so
locality is preserved. The final node-wise transform yields one logit per
role class.

Scheduling proceeds by iterative one-shot node classification: classify
all nodes, turn query-role nodes into interrogation records against the
cached remaining-tag state, resolve constraint violations per the policy,
emit the slot, remove the interrogated tags, repeat until none remain.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field

import numpy as np

from .core import (Interrogation, ProblemInstance, Role, Schedule, Timeslot,
                   Topology)
from .errors import ConfigError, ScheduleFailureError, SlotFailure
from .features import build_feature_matrix
from .heuristic import greedy_slot
from .weights import ATTN_LEAKY_SLOPE, LAYER_NORM_EPS, GnnModel

# argmax tie preference: progress first, then carriers, then idle
_TIE_ORDER = (Role.TAG_QUERY, Role.CARRIER, Role.IDLE)


def _closed_edges(topology: Topology) -> tuple[np.ndarray, np.ndarray]:
    """Directed (src, dst) pairs for every edge both ways plus self-loops,
    sorted by (dst, src) so accumulation order is fixed."""
    pairs = [(u, u) for u in range(topology.node_count)]
    for u, v in topology.edges:
        pairs.append((u, v))
        pairs.append((v, u))
    pairs.sort(key=lambda p: (p[1], p[0]))
    src = np.array([p[0] for p in pairs], dtype=np.int64)
    dst = np.array([p[1] for p in pairs], dtype=np.int64)
    return src, dst


def _layer_norm(x: np.ndarray, gain: np.ndarray, bias: np.ndarray) -> np.ndarray:
    mean = x.mean(axis=1, keepdims=True)
    var = x.var(axis=1, keepdims=True)
    return (x - mean) / np.sqrt(var + LAYER_NORM_EPS) * gain + bias


def _leaky_relu(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0.0, x, ATTN_LEAKY_SLOPE * x)


def _segment_softmax(scores: np.ndarray, dst: np.ndarray, n: int) -> np.ndarray:
    smax = np.full(n, -np.inf)
    np.maximum.at(smax, dst, scores)
    shifted = np.exp(scores - smax[dst])
    denom = np.zeros(n)
    np.add.at(denom, dst, shifted)
    return shifted / denom[dst]


def forward(model: GnnModel, features: np.ndarray,
            topology: Topology) -> np.ndarray:
    """N x 3 logits; float64 throughout, deterministic accumulation order."""
    n = topology.node_count
    if features.shape[0] != n:
        raise ValueError(
            f"feature matrix has {features.shape[0]} rows, topology {n} nodes")
    if features.shape[1] != model.config.input_dim:
        raise ValueError(
            f"feature matrix has {features.shape[1]} columns, model expects "
            f"{model.config.input_dim}")
    w = {k: v.astype(np.float64) for k, v in model.tensors.items()}
    src, dst = _closed_edges(topology)

    h = features @ w["embed.w"].T + w["embed.b"]
    for i in range(model.config.num_blocks):
        p = f"block{i}"
        ff = np.maximum(h @ w[f"{p}.ff.w"].T + w[f"{p}.ff.b"], 0.0)
        h = _layer_norm(h + ff, w[f"{p}.ln1.g"], w[f"{p}.ln1.b"])
        head_outs = []
        for m in range(model.config.num_heads):
            q = f"{p}.head{m}"
            dh = model.config.head_dim
            query = h @ w[f"{q}.wq"].T
            key = h @ w[f"{q}.wk"].T
            value = h @ w[f"{q}.wv"].T
            a_dst = w[f"{q}.a"][:dh]
            a_src = w[f"{q}.a"][dh:]
            scores = _leaky_relu(query[dst] @ a_dst + key[src] @ a_src)
            alpha = _segment_softmax(scores, dst, n)
            out = np.zeros((n, dh))
            np.add.at(out, dst, alpha[:, None] * value[src])
            head_outs.append(out)
        attn = np.concatenate(head_outs, axis=1)
        attn = attn @ w[f"{p}.attn_out.w"].T + w[f"{p}.attn_out.b"]
        h = _layer_norm(h + attn, w[f"{p}.ln2.g"], w[f"{p}.ln2.b"])
    return h @ w["classify.w"].T + w["classify.b"]


def argmax_roles(logits: np.ndarray) -> list[Role]:
    """Per-node argmax with the deterministic tie order T > C > O."""
    roles = []
    for row in logits:
        best = _TIE_ORDER[0]
        for cls in _TIE_ORDER[1:]:
            if row[cls] > row[best]:
                best = cls
        roles.append(Role(best))
    return roles


class RepairMode(enum.Enum):
    STRICT_FAIL = "strict"
    GREEDY_REPAIR = "repair"
    HEURISTIC_FALLBACK = "fallback"


@dataclass(frozen=True)
class InferencePolicy:
    repair: RepairMode = RepairMode.GREEDY_REPAIR
    max_slots: int | None = None  # None -> T + 2 for the instance at hand

    def slot_limit(self, tag_count: int) -> int:
        if self.max_slots is None:
            return tag_count + 2
        if self.max_slots < tag_count:
            raise ConfigError(
                f"max_slots {self.max_slots} below tag count {tag_count}; "
                "any complete schedule needs up to one slot per tag")
        return self.max_slots


@dataclass
class CachedInstance:
    """Mutable per-request scheduling state over an immutable instance."""

    instance: ProblemInstance
    remaining: set[int] = dc_field(default_factory=set)
    slots_emitted: list[Timeslot] = dc_field(default_factory=list)

    @classmethod
    def fresh(cls, instance: ProblemInstance) -> "CachedInstance":
        return cls(instance, {t for t, _ in instance.tags}, [])


def _resolve_slot(instance: ProblemInstance, remaining: set[int],
                  roles: list[Role], policy: InferencePolicy) -> Timeslot:
    """Turn a raw classification into a constraint-satisfying slot.

    Raises SlotFailure when the policy cannot extract any interrogation.
    """
    topo = instance.topology
    pending_by_host: dict[int, list[int]] = {}
    for tag_id, host in instance.tags:
        if tag_id in remaining:
            pending_by_host.setdefault(host, []).append(tag_id)
    for tags in pending_by_host.values():
        tags.sort()

    roles = list(roles)
    carrier_set = {v for v, r in enumerate(roles) if r is Role.CARRIER}

    def carrier_neighbors(v: int) -> list[int]:
        return [u for u in topo.neighbors[v] if u in carrier_set]

    strict = policy.repair is RepairMode.STRICT_FAIL
    records: list[tuple[int, int, int]] = []
    for v, role in enumerate(roles):
        if role is not Role.TAG_QUERY:
            continue
        tags = pending_by_host.get(v)
        if not tags:
            if strict:
                raise SlotFailure(
                    f"node {v} classified to query but hosts no pending tag")
            roles[v] = Role.IDLE
            continue
        powering = carrier_neighbors(v)
        if len(powering) != 1:
            if strict:
                raise SlotFailure(
                    f"host {v} has {len(powering)} carrier neighbors")
            roles[v] = Role.IDLE
            continue
        records.append((v, tags[0], powering[0]))

    # carriers powering no surviving interrogation are wasted energy
    useful = {carrier for _, _, carrier in records}
    for v in sorted(carrier_set):
        if v not in useful:
            if strict:
                # a stray carrier is legal; only drop it when repairing
                continue
            roles[v] = Role.IDLE

    if not records:
        if policy.repair is RepairMode.HEURISTIC_FALLBACK:
            slot = greedy_slot(instance, remaining)
            if slot is not None:
                return slot
        raise SlotFailure("no interrogation achievable under the policy")
    if strict:
        # keep the raw role vector (stray carriers included, they are legal)
        return Timeslot(tuple(roles),
                        tuple(Interrogation(*r) for r in records))
    return Timeslot.from_interrogations(topo.node_count, records)


def next_timeslot(model: GnnModel, cached: CachedInstance,
                  policy: InferencePolicy) -> Timeslot:
    """Classify, resolve, and commit one slot; updates the cache."""
    if not cached.remaining:
        raise ValueError("no remaining tags to schedule")
    feats = build_feature_matrix(cached.instance, cached.remaining,
                                 model.config.pe_mode)
    logits = forward(model, feats, cached.instance.topology)
    roles = argmax_roles(logits)
    slot = _resolve_slot(cached.instance, cached.remaining, roles, policy)
    for rec in slot.interrogations:
        cached.remaining.discard(rec.tag_id)
    cached.slots_emitted.append(slot)
    return slot


def schedule_with_gnn(model: GnnModel, instance: ProblemInstance,
                      policy: InferencePolicy = InferencePolicy()) -> Schedule:
    """Full schedule via iterative one-shot node classification.

    Raises ScheduleFailureError (carrying the partial slot list) on a slot
    failure or when the slot limit is exceeded; a partial result still
    counts as a failed schedule.
    """
    cached = CachedInstance.fresh(instance)
    limit = policy.slot_limit(instance.tag_count)
    while cached.remaining:
        if len(cached.slots_emitted) >= limit:
            raise ScheduleFailureError(
                f"no complete schedule within {limit} slots",
                partial_slots=cached.slots_emitted)
        try:
            next_timeslot(model, cached, policy)
        except SlotFailure as exc:
            raise ScheduleFailureError(
                f"slot {len(cached.slots_emitted) + 1} failed: {exc}",
                partial_slots=cached.slots_emitted) from exc
    return Schedule(cached.slots_emitted)
