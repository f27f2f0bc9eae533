"""JSON wire formats for instances and schedules.

Instance:  {"nodes": N, "edges": [[u, v], ...],
            "tags": [{"id": k, "host": u}, ...]}
Schedule:  {"L": slots, "C": carriers,
            "slots": [{"interrogations":
                        [{"node": u, "tag": k, "carrier": w}, ...]}, ...]}

Role vectors are not serialized: they are derived from the interrogation
records, which holds for every schedule emitted by this package. Parsing
re-derives them and cross-checks the declared C and L.
"""

from __future__ import annotations

import json

from .core import ProblemInstance, Schedule, Timeslot, Topology
from .errors import ParseError


def _load_json(data: bytes | str, what: str) -> dict:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(what, f"not valid UTF-8: {exc}") from None
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(what, f"malformed JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ParseError(what, "top-level value must be an object")
    return obj


def parse_instance(data: bytes | str) -> ProblemInstance:
    """Parse and fully validate an instance document."""
    obj = _load_json(data, "instance")
    nodes = obj.get("nodes")
    if not isinstance(nodes, int) or isinstance(nodes, bool) or nodes < 1:
        raise ParseError("nodes", "must be an integer >= 1")
    edges_raw = obj.get("edges")
    if not isinstance(edges_raw, list):
        raise ParseError("edges", "must be a list of [u, v] pairs")
    edges = []
    for i, e in enumerate(edges_raw):
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(x, int) and not isinstance(x, bool)
                           for x in e)):
            raise ParseError(f"edges[{i}]", "must be a pair of integers")
        u, v = e
        if u == v:
            raise ParseError(f"edges[{i}]", "self-loops are not allowed")
        if not (0 <= u < nodes and 0 <= v < nodes):
            raise ParseError(f"edges[{i}]", f"node id out of range [0, {nodes})")
        edges.append((u, v))
    if len({(min(u, v), max(u, v)) for u, v in edges}) != len(edges):
        raise ParseError("edges", "duplicate edges are not allowed")
    tags_raw = obj.get("tags")
    if not isinstance(tags_raw, list) or not tags_raw:
        raise ParseError("tags", "must be a non-empty list")
    tags = []
    seen = set()
    for i, t in enumerate(tags_raw):
        if not isinstance(t, dict):
            raise ParseError(f"tags[{i}]", "must be an object")
        tag_id = t.get("id")
        host = t.get("host")
        if not isinstance(tag_id, int) or isinstance(tag_id, bool) or tag_id < 1:
            raise ParseError(f"tags[{i}].id", "must be an integer >= 1")
        if tag_id in seen:
            raise ParseError(f"tags[{i}].id", f"duplicate tag id {tag_id}")
        seen.add(tag_id)
        if (not isinstance(host, int) or isinstance(host, bool)
                or not (0 <= host < nodes)):
            raise ParseError(f"tags[{i}].host",
                             f"must be a node id in [0, {nodes})")
        tags.append((tag_id, host))
    try:
        topology = Topology(nodes, edges)
    except ValueError as exc:
        raise ParseError("edges", str(exc)) from None
    return ProblemInstance(topology, tags)


def emit_instance(instance: ProblemInstance) -> bytes:
    doc = {
        "nodes": instance.node_count,
        "edges": sorted([u, v] for u, v in instance.topology.edges),
        "tags": [{"id": t, "host": h} for t, h in instance.tags],
    }
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def emit_schedule(instance: ProblemInstance, schedule: Schedule) -> bytes:
    """Serialize a schedule; C/L are derived from the records.

    The schema carries interrogation records only, so a slot's role vector
    is represented by its record-derived form. Carrier-role nodes that
    power no interrogation (legal, but never produced by this package's
    schedulers) are not representable and are canonicalized away.
    """
    cost_c = sum(len({rec.carrier for rec in slot.interrogations})
                 for slot in schedule.slots)
    doc = {
        "L": schedule.length,
        "C": cost_c,
        "slots": [
            {"interrogations": [
                {"node": rec.host, "tag": rec.tag_id, "carrier": rec.carrier}
                for rec in slot.interrogations]}
            for slot in schedule.slots],
    }
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def parse_schedule(data: bytes | str, instance: ProblemInstance) -> Schedule:
    """Rebuild a schedule; roles are derived from the records."""
    obj = _load_json(data, "schedule")
    slots_raw = obj.get("slots")
    if not isinstance(slots_raw, list):
        raise ParseError("slots", "must be a list")
    slots = []
    n = instance.node_count
    for i, s in enumerate(slots_raw):
        if not isinstance(s, dict) or not isinstance(s.get("interrogations"), list):
            raise ParseError(f"slots[{i}]",
                             "must be an object with an interrogations list")
        records = []
        for j, r in enumerate(s["interrogations"]):
            if not isinstance(r, dict):
                raise ParseError(f"slots[{i}].interrogations[{j}]",
                                 "must be an object")
            try:
                host, tag, carrier = r["node"], r["tag"], r["carrier"]
            except KeyError as exc:
                raise ParseError(f"slots[{i}].interrogations[{j}]",
                                 f"missing key {exc}") from None
            for name, value in (("node", host), ("carrier", carrier)):
                if (not isinstance(value, int) or isinstance(value, bool)
                        or not (0 <= value < n)):
                    raise ParseError(
                        f"slots[{i}].interrogations[{j}].{name}",
                        f"must be a node id in [0, {n})")
            if not isinstance(tag, int) or isinstance(tag, bool) or tag < 1:
                raise ParseError(f"slots[{i}].interrogations[{j}].tag",
                                 "must be an integer >= 1")
            records.append((host, tag, carrier))
        slots.append(Timeslot.from_interrogations(n, records))
    schedule = Schedule(slots)
    declared_l = obj.get("L")
    declared_c = obj.get("C")
    if declared_l is not None and declared_l != schedule.length:
        raise ParseError("L", f"declared {declared_l}, slots say {schedule.length}")
    if declared_c is not None and declared_c != schedule.carrier_count:
        raise ParseError(
            "C", f"declared {declared_c}, derived roles say "
            f"{schedule.carrier_count}")
    return schedule
