"""Domain types for carrier scheduling plus the constraint validator.

A schedule assigns one of three roles to every node per timeslot: provide
an unmodulated carrier, query one of its own tags, or stay idle. The
validator enforces the interrogation constraints every scheduler in this
package must satisfy: each tag queried exactly once over the schedule,
exactly one carrier-providing neighbor per queried tag per slot, one tag
per host per slot, and no empty slots.
"""

from __future__ import annotations

import enum
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import StructureError


class Role(enum.IntEnum):
    """Per-node action within one timeslot. Values double as class indices."""

    CARRIER = 0
    TAG_QUERY = 1
    IDLE = 2


@dataclass(frozen=True)
class Topology:
    """Undirected connected graph over nodes 0..N-1."""

    node_count: int
    edges: frozenset[tuple[int, int]]
    neighbors: tuple[tuple[int, ...], ...] = field(
        init=False, repr=False, compare=False)

    def __init__(self, node_count: int, edges: Iterable[tuple[int, int]]):
        if node_count < 1:
            raise ValueError("node_count must be >= 1")
        normalized = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ValueError(f"edge ({u},{v}) out of range for N={node_count}")
            normalized.add((min(u, v), max(u, v)))
        object.__setattr__(self, "node_count", node_count)
        object.__setattr__(self, "edges", frozenset(normalized))
        adj: list[list[int]] = [[] for _ in range(node_count)]
        for u, v in normalized:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(
            self, "neighbors", tuple(tuple(sorted(a)) for a in adj))
        if not self._connected():
            raise ValueError("graph is not connected")

    def _connected(self) -> bool:
        seen = [False] * self.node_count
        seen[0] = True
        queue = deque([0])
        reached = 1
        while queue:
            u = queue.popleft()
            for v in self.neighbors[u]:
                if not seen[v]:
                    seen[v] = True
                    reached += 1
                    queue.append(v)
        return reached == self.node_count

    def degree(self, u: int) -> int:
        return len(self.neighbors[u])

    def adjacency_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor lists in CSR form (indptr, indices), both int64."""
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        for u in range(self.node_count):
            indptr[u + 1] = indptr[u] + len(self.neighbors[u])
        indices = np.empty(indptr[-1], dtype=np.int64)
        for u in range(self.node_count):
            indices[indptr[u]:indptr[u + 1]] = self.neighbors[u]
        return indptr, indices

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.node_count, self.node_count), dtype=np.float64)
        for u, v in self.edges:
            a[u, v] = 1.0
            a[v, u] = 1.0
        return a


@dataclass(frozen=True)
class ProblemInstance:
    """A topology plus the tags to interrogate and their host nodes.

    Tag IDs are dense positive integers (1 upward); node IDs count from 0.
    Lower IDs carry priority semantics for the symmetry-breaking order.
    """

    topology: Topology
    tags: tuple[tuple[int, int], ...]  # (tag_id, host), sorted by tag_id

    def __init__(self, topology: Topology, tags: Iterable[tuple[int, int]]):
        tag_list = sorted((int(t), int(h)) for t, h in tags)
        if not tag_list:
            raise ValueError("instance needs at least one tag")
        seen_ids = set()
        for tag_id, host in tag_list:
            if tag_id < 1:
                raise ValueError(f"tag id {tag_id} must be >= 1")
            if tag_id in seen_ids:
                raise ValueError(f"duplicate tag id {tag_id}")
            seen_ids.add(tag_id)
            if not (0 <= host < topology.node_count):
                raise ValueError(f"tag {tag_id} host {host} out of range")
        object.__setattr__(self, "topology", topology)
        object.__setattr__(self, "tags", tuple(tag_list))

    @property
    def node_count(self) -> int:
        return self.topology.node_count

    @property
    def tag_count(self) -> int:
        return len(self.tags)

    @property
    def max_tag_id(self) -> int:
        return self.tags[-1][0]

    @property
    def host_of(self) -> dict[int, int]:
        return {t: h for t, h in self.tags}

    def tags_of_host(self, host: int) -> tuple[int, ...]:
        return tuple(t for t, h in self.tags if h == host)


class Interrogation(NamedTuple):
    host: int
    tag_id: int
    carrier: int


@dataclass(frozen=True)
class Timeslot:
    """One schedule step: a role per node plus explicit interrogation records.

    The role vector is derivable from the records; it is stored so the
    validator can score hand-built (possibly inconsistent) slots too.
    """

    roles: tuple[Role, ...]
    interrogations: tuple[Interrogation, ...]

    @classmethod
    def from_interrogations(
            cls, node_count: int,
            records: Iterable[tuple[int, int, int]]) -> "Timeslot":
        records = tuple(Interrogation(*r) for r in records)
        roles = [Role.IDLE] * node_count
        for host, _tag, carrier in records:
            roles[host] = Role.TAG_QUERY
            roles[carrier] = Role.CARRIER
        return cls(tuple(roles), records)


@dataclass(frozen=True)
class Schedule:
    slots: tuple[Timeslot, ...]

    def __init__(self, slots: Iterable[Timeslot]):
        object.__setattr__(self, "slots", tuple(slots))

    @property
    def length(self) -> int:
        """L: number of timeslots."""
        return len(self.slots)

    @property
    def carrier_count(self) -> int:
        """C: total carrier-role assignments across all slots."""
        return sum(
            sum(1 for r in slot.roles if r is Role.CARRIER)
            for slot in self.slots)


class ViolationKind(enum.Enum):
    EMPTY_SLOT = "empty_slot"
    ROLE_MISMATCH = "role_mismatch"
    UNPOWERED = "unpowered"
    CARRIER_INTERFERENCE = "carrier_interference"
    MULTI_QUERY = "multi_query"
    CARRIER_NOT_NEIGHBOR = "carrier_not_neighbor"
    TAG_NOT_HOSTED = "tag_not_hosted"
    DANGLING_QUERY = "dangling_query"


class Violation(NamedTuple):
    slot: int
    kind: ViolationKind
    subjects: tuple[int, ...]


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[Violation, ...]
    never_interrogated: frozenset[int]
    multiply_interrogated: frozenset[int]


def validate_schedule(instance: ProblemInstance,
                      schedule: Schedule) -> ValidationReport:
    """Check a schedule against every interrogation constraint.

    Returns a report listing, per slot: empty slots; role vectors that
    contradict the records; queried hosts with zero (unpowered) or two or
    more (interference) carrier neighbors; hosts appearing in more than one
    record; recorded carriers that are not topology neighbors of the host;
    records naming a tag the node does not host; and query-role nodes with
    no record. Tags interrogated zero or multiple times over the whole
    schedule land in the completeness sets.

    Raises StructureError when a slot's role vector does not match the
    instance's node count (distinct from any constraint violation).
    """
    topo = instance.topology
    n = topo.node_count
    for idx, slot in enumerate(schedule.slots):
        if len(slot.roles) != n:
            raise StructureError(
                f"slot {idx} has {len(slot.roles)} roles, instance has {n} nodes")

    host_of = instance.host_of
    violations: list[Violation] = []
    tag_counts: Counter[int] = Counter()

    for idx, slot in enumerate(schedule.slots):
        if not slot.interrogations:
            violations.append(Violation(idx, ViolationKind.EMPTY_SLOT, ()))
        hosts_in_records: Counter[int] = Counter(
            rec.host for rec in slot.interrogations)
        for host, count in sorted(hosts_in_records.items()):
            if count > 1:
                violations.append(
                    Violation(idx, ViolationKind.MULTI_QUERY, (host,)))
        for rec in slot.interrogations:
            if slot.roles[rec.host] is not Role.TAG_QUERY:
                violations.append(
                    Violation(idx, ViolationKind.ROLE_MISMATCH, (rec.host,)))
            if slot.roles[rec.carrier] is not Role.CARRIER:
                violations.append(
                    Violation(idx, ViolationKind.ROLE_MISMATCH, (rec.carrier,)))
            if rec.carrier not in topo.neighbors[rec.host]:
                violations.append(Violation(
                    idx, ViolationKind.CARRIER_NOT_NEIGHBOR,
                    (rec.host, rec.carrier)))
            if host_of.get(rec.tag_id) != rec.host:
                violations.append(Violation(
                    idx, ViolationKind.TAG_NOT_HOSTED, (rec.host, rec.tag_id)))
            carrier_neighbors = sum(
                1 for v in topo.neighbors[rec.host]
                if slot.roles[v] is Role.CARRIER)
            if carrier_neighbors == 0:
                violations.append(Violation(
                    idx, ViolationKind.UNPOWERED, (rec.host, rec.tag_id)))
            elif carrier_neighbors >= 2:
                violations.append(Violation(
                    idx, ViolationKind.CARRIER_INTERFERENCE,
                    (rec.host, rec.tag_id)))
            if rec.tag_id in host_of:
                tag_counts[rec.tag_id] += 1
        for v in range(n):
            if slot.roles[v] is Role.TAG_QUERY and hosts_in_records[v] == 0:
                violations.append(
                    Violation(idx, ViolationKind.DANGLING_QUERY, (v,)))

    never = frozenset(t for t, _ in instance.tags if tag_counts[t] == 0)
    multiple = frozenset(t for t, c in tag_counts.items() if c >= 2)
    valid = not violations and not never and not multiple
    return ValidationReport(valid, tuple(violations), never, multiple)


class ScheduleCost(NamedTuple):
    carriers: int
    length: int
    objective: int


def schedule_cost(instance: ProblemInstance,
                  schedule: Schedule) -> ScheduleCost:
    """Pure accounting: C, L and the objective T*C + L.

    The T multiplier makes any carrier saving outweigh any latency change,
    so minimizing the objective minimizes C first, then L.
    """
    c = schedule.carrier_count
    length = schedule.length
    return ScheduleCost(c, length, instance.tag_count * c + length)
