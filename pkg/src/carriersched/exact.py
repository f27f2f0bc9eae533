"""Optimal scheduler with deterministic symmetry-breaking tie-breaks.

Minimizes T*C + L over all valid schedules, then among objective-optimal
schedules lexicographically minimizes (1) the per-tag interrogation slot
index vector (tags in id order) and then (2) the per-tag carrier node-id
vector. The double lexicographic minimization makes the optimum unique, so
the solver doubles as a deterministic labeling oracle.

Search structure: because slots are independent once the tag partition is
fixed, the optimum objective comes from a dynamic program over tag
subsets, with the minimum carrier count of a slot memoized per host set
(an exact-one cover: every queried host needs exactly one chosen neighbor).
The lexicographic winners are then reconstructed by a pruned depth-first
search over restricted-growth partition strings and per-slot carrier
choices, both explored in ascending order so the first completion found is
the lexicographic minimum.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import accel
from .core import ProblemInstance, Schedule, Timeslot
from .errors import (BudgetExceededError, InfeasibleInstanceError,
                     SolverTimeoutError)


@dataclass(frozen=True)
class SolverBudget:
    """Hard caps so the solver refuses oversized instances up front."""

    max_nodes: int = 10
    time_limit: float | None = 60.0
    node_expansion_limit: int = 10_000_000


DEFAULT_BUDGET = SolverBudget()


class _Search:
    def __init__(self, instance: ProblemInstance, budget: SolverBudget,
                 prune: bool):
        self.instance = instance
        self.budget = budget
        self.prune = prune
        self.tag_ids = [t for t, _ in instance.tags]
        self.hosts = [h for _, h in instance.tags]
        self.t = len(self.tag_ids)
        topo = instance.topology
        self.nbr_mask = [0] * topo.node_count
        for u in range(topo.node_count):
            m = 0
            for v in topo.neighbors[u]:
                m |= 1 << v
            self.nbr_mask[u] = m
        self.neighbors = topo.neighbors
        self._mc_memo: dict[int, float] = {}
        self.deadline = (time.monotonic() + budget.time_limit
                         if budget.time_limit is not None else None)
        self.expansions = 0
        self.incumbent: Schedule | None = None

    def check_deadline(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolverTimeoutError(
                "time limit exhausted", incumbent=self.incumbent)

    def _tick(self):
        self.expansions += 1
        if self.expansions % 4096 == 0:
            self.check_deadline()
        if self.expansions > self.budget.node_expansion_limit:
            raise SolverTimeoutError(
                "node expansion limit exhausted", incumbent=self.incumbent)

    # -- minimum carriers for one slot's host set (exact-one cover) --------

    def min_carriers(self, hostmask: int) -> float:
        cached = self._mc_memo.get(hostmask)
        if cached is not None:
            return cached
        hosts = _bits(hostmask)
        best = [float("inf")]

        def dfs(covered: int, count: int):
            self._tick()
            if self.prune and count + 1 >= best[0]:
                # every extra carrier adds at least 1
                remaining = hostmask & ~covered
                if remaining:
                    return
            remaining = hostmask & ~covered
            if not remaining:
                if count < best[0]:
                    best[0] = count
                return
            h = (remaining & -remaining).bit_length() - 1
            for w in self.neighbors[h]:
                wb = 1 << w
                if wb & hostmask:
                    continue  # a queried host cannot also provide the carrier
                if self.nbr_mask[w] & covered:
                    continue  # would put a second carrier on a covered host
                dfs(covered | (self.nbr_mask[w] & hostmask), count + 1)

        dfs(0, 0)
        self._mc_memo[hostmask] = best[0]
        return best[0]

    # -- lexicographically minimal carrier set for one slot ----------------

    def lex_min_carriers(self, group_tags: list[int],
                         hostmask: int, carrier_budget: int) -> dict[int, int]:
        """Carrier per tag index, minimizing the tag-id-ordered carrier vector.

        Choosing a carrier set K fixes each host's carrier (its unique
        neighbor in K), so the vector is explored by covering hosts in tag
        order with ascending candidate node ids; the first full cover that
        spends exactly the slot's minimum carrier count is the lex minimum.
        """
        host_seq = [self.hosts[i] for i in group_tags]
        found: dict[str, list[int] | None] = {"k": None}

        def dfs(pos: int, covered: int, chosen: list[int]):
            if found["k"] is not None:
                return
            self._tick()
            while pos < len(host_seq) and (1 << host_seq[pos]) & covered:
                pos += 1
            if pos == len(host_seq):
                if len(chosen) == carrier_budget:
                    found["k"] = list(chosen)
                return
            if len(chosen) >= carrier_budget:
                return
            h = host_seq[pos]
            for w in self.neighbors[h]:
                wb = 1 << w
                if wb & hostmask:
                    continue
                if self.nbr_mask[w] & covered:
                    continue
                chosen.append(w)
                dfs(pos + 1, covered | (self.nbr_mask[w] & hostmask), chosen)
                chosen.pop()
                if found["k"] is not None:
                    return

        dfs(0, 0, [])
        k = found["k"]
        if k is None:  # cannot happen: budget == min_carriers(hostmask)
            raise RuntimeError("carrier reconstruction failed")
        out = {}
        for i in group_tags:
            h = self.hosts[i]
            for w in k:
                if self.nbr_mask[w] & (1 << h):
                    out[i] = w
                    break
        return out


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _group_costs(search: _Search) -> tuple[np.ndarray, list[int]]:
    """Cost of using one subset of tags as a single slot, for every subset."""
    t = search.t
    size = 1 << t
    hostmask_of = [0] * size
    collide = [False] * size
    gcost = np.full(size, np.inf, dtype=np.float64)
    for g in range(1, size):
        low = g & -g
        i = low.bit_length() - 1
        prev = g ^ low
        hb = 1 << search.hosts[i]
        collide[g] = collide[prev] or bool(hostmask_of[prev] & hb)
        hostmask_of[g] = hostmask_of[prev] | hb
        if collide[g]:
            continue
        mc = search.min_carriers(hostmask_of[g])
        if mc != float("inf"):
            gcost[g] = t * mc + 1.0
    return gcost, hostmask_of


def _reconstruct_partition(search: _Search, obj_star: float) -> list[list[int]]:
    """Lex-min restricted-growth partition among objective-optimal ones.

    Tags are placed in id order into the lowest-index compatible group
    first; a branch is cut when an admissible lower bound (monotone slot
    carrier minima plus groups forced by repeated hosts) exceeds the known
    optimum.
    """
    t = search.t
    hosts = search.hosts
    n = search.instance.node_count
    suffix_mult = [[0] * n for _ in range(t + 1)]
    for i in range(t - 1, -1, -1):
        suffix_mult[i] = suffix_mult[i + 1].copy()
        suffix_mult[i][hosts[i]] += 1

    groups_tags: list[list[int]] = []
    groups_mask: list[int] = []
    groups_mc: list[float] = []
    result: list[list[int]] | None = None

    def lower_bound(i: int) -> float:
        m = len(groups_mask)
        sum_mc = sum(groups_mc)
        forced = 0
        for h in range(n):
            if suffix_mult[i][h] == 0:
                continue
            avail = sum(1 for gm in groups_mask if not (gm & (1 << h)))
            deficit = suffix_mult[i][h] - avail
            if deficit > forced:
                forced = deficit
        return t * (sum_mc + forced) + m + forced

    def dfs(i: int) -> bool:
        nonlocal result
        search._tick()
        if i == t:
            total = t * sum(groups_mc) + len(groups_mask)
            if total == obj_star:
                result = [list(g) for g in groups_tags]
                return True
            return False
        hb = 1 << hosts[i]
        for j in range(len(groups_mask) + 1):
            if j < len(groups_mask):
                if groups_mask[j] & hb:
                    continue
                new_mask = groups_mask[j] | hb
                mc = search.min_carriers(new_mask)
                if mc == float("inf"):
                    continue
                old_mask, old_mc = groups_mask[j], groups_mc[j]
                groups_tags[j].append(i)
                groups_mask[j], groups_mc[j] = new_mask, mc
                ok = (not search.prune) or lower_bound(i + 1) <= obj_star
                if ok and dfs(i + 1):
                    return True
                groups_tags[j].pop()
                groups_mask[j], groups_mc[j] = old_mask, old_mc
            else:
                mc = search.min_carriers(hb)
                groups_tags.append([i])
                groups_mask.append(hb)
                groups_mc.append(mc)
                ok = (not search.prune) or lower_bound(i + 1) <= obj_star
                if ok and dfs(i + 1):
                    return True
                groups_tags.pop()
                groups_mask.pop()
                groups_mc.pop()
        return False

    if not dfs(0):
        raise RuntimeError("optimal partition reconstruction failed")
    return result


def _quick_schedule(search: _Search, dp: np.ndarray,
                    gcost: np.ndarray, hostmask_of: list[int]) -> Schedule:
    """Any objective-optimal schedule straight off the DP table (incumbent)."""
    t = search.t
    full = (1 << t) - 1
    groups: list[int] = []
    s = full
    while s:
        low = s & -s
        rest = s ^ low
        sub = rest
        chosen = None
        while True:
            g = sub | low
            if gcost[g] + dp[s ^ g] == dp[s]:
                chosen = g
                break
            if sub == 0:
                break
            sub = (sub - 1) & rest
        if chosen is None:
            raise RuntimeError("DP table inconsistent")
        groups.append(chosen)
        s ^= chosen
    slots = []
    for g in groups:
        tags = _bits(g)
        mc = int(search.min_carriers(hostmask_of[g]))
        carriers = search.lex_min_carriers(tags, hostmask_of[g], mc)
        records = [(search.hosts[i], search.tag_ids[i], carriers[i])
                   for i in tags]
        slots.append(Timeslot.from_interrogations(
            search.instance.node_count, records))
    return Schedule(slots)


def solve_optimal(instance: ProblemInstance,
                  budget: SolverBudget = DEFAULT_BUDGET, *,
                  prune: bool = True) -> Schedule:
    """The unique optimal schedule under the lexicographic tie-breaks.

    Raises BudgetExceededError for instances over the budget caps,
    InfeasibleInstanceError when some tag's host has no neighbor at all,
    and SolverTimeoutError (carrying the best incumbent, possibly None)
    when time or expansion budgets run out mid-search. The prune flag only
    toggles branch-and-bound cuts; it never changes the returned schedule.
    """
    n = instance.node_count
    if n > budget.max_nodes:
        raise BudgetExceededError(
            f"instance has {n} nodes, budget allows {budget.max_nodes}")
    t = instance.tag_count
    if 3 ** t > budget.node_expansion_limit:
        raise BudgetExceededError(
            f"{t} tags require ~3^{t} subset steps, over the expansion limit")
    for tag_id, host in instance.tags:
        if len(instance.topology.neighbors[host]) == 0:
            raise InfeasibleInstanceError(tag_id)

    search = _Search(instance, budget, prune)
    search.check_deadline()
    gcost, hostmask_of = _group_costs(search)
    search.check_deadline()
    dp = accel.partition_dp(gcost)
    obj_star = float(dp[(1 << t) - 1])
    if not np.isfinite(obj_star):
        # cannot happen after the per-tag feasibility check: singleton
        # groups always admit a cover
        raise InfeasibleInstanceError(instance.tags[0][0],
                                      "no feasible partition exists")

    search.incumbent = _quick_schedule(search, dp, gcost, hostmask_of)
    groups = _reconstruct_partition(search, obj_star)
    slots = []
    for tags in groups:
        mask = 0
        for i in tags:
            mask |= 1 << search.hosts[i]
        mc = int(search.min_carriers(mask))
        carriers = search.lex_min_carriers(tags, mask, mc)
        records = [(search.hosts[i], search.tag_ids[i], carriers[i])
                   for i in tags]
        slots.append(Timeslot.from_interrogations(n, records))
    return Schedule(slots)
