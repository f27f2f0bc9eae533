"""Hot numeric kernels: numba-jitted loops with pure-numpy fallbacks.

Three inner loops dominate runtime at scale: the cyclic-Jacobi eigensolver
behind the Laplacian positional encoding, the subset-partition dynamic
program inside the exact solver, and the greedy carrier-selection sweep of
the heuristic scheduler. Each has two implementations with identical
semantics:

* a loop formulation compiled with ``numba.njit`` (default when numba is
  importable), and
* a pure-numpy formulation used when numba is missing or when the
  environment variable ``CARRIERSCHED_NO_NUMBA`` is set to 1/true/yes.

``benchmarks/bench_accel.py`` times both paths side by side.
"""

from __future__ import annotations

import math
import os

import numpy as np

try:
    from numba import njit as _njit
    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via env flag instead
    _HAVE_NUMBA = False

_FLAG = os.environ.get("CARRIERSCHED_NO_NUMBA", "").strip().lower()
NUMBA_ACTIVE = _HAVE_NUMBA and _FLAG not in {"1", "true", "yes"}


# ---------------------------------------------------------------------------
# Cyclic Jacobi eigenvalues (symmetric input, eigenvalues only)

def _jacobi_eigvals_loops(a, tol, max_sweeps):
    """Rotate away off-diagonal mass sweep by sweep; returns (diag, converged)."""
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += a[i, j] * a[i, j]
        if math.sqrt(2.0 * off) <= tol:
            out = np.empty(n, dtype=np.float64)
            for i in range(n):
                out[i] = a[i, i]
            return out, True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
    off = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            off += a[i, j] * a[i, j]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        out[i] = a[i, i]
    return out, math.sqrt(2.0 * off) <= tol


def _offdiag_norm(a, iu):
    # summed directly over the strict upper triangle; the subtraction form
    # sum(a^2) - sum(diag^2) cancels catastrophically near convergence
    return math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))


def _jacobi_eigvals_numpy(a, tol, max_sweeps):
    """Same rotations as the loop kernel, rows/columns updated vectorized."""
    n = a.shape[0]
    iu = np.triu_indices(n, k=1)
    for _ in range(max_sweeps):
        if _offdiag_norm(a, iu) <= tol:
            return np.diag(a).copy(), True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
    return np.diag(a).copy(), _offdiag_norm(a, iu) <= tol


# ---------------------------------------------------------------------------
# Subset-partition DP: dp[S] = min over groups g (containing S's lowest tag)
# of gcost[g] + dp[S \ g]. gcost carries inf for infeasible groups.

def _partition_dp_loops(gcost):
    size = gcost.shape[0]
    dp = np.empty(size, dtype=np.float64)
    dp[0] = 0.0
    for s in range(1, size):
        low = s & (-s)
        rest = s ^ low
        best = np.inf
        sub = rest
        while True:
            g = sub | low
            cost = gcost[g] + dp[s ^ g]
            if cost < best:
                best = cost
            if sub == 0:
                break
            sub = (sub - 1) & rest
        dp[s] = best
    return dp


# ---------------------------------------------------------------------------
# Greedy slot construction for the heuristic scheduler.
#
# Per slot, repeatedly pick the carrier candidate covering the most pending
# tags whose hosts are its neighbors, are not yet interrogating, and have no
# other active carrier neighbor; candidates adjacent to an already
# interrogating host are banned (they would interfere). Ties go to the
# lowest node id. Each covered host queries its lowest pending tag.

def _greedy_schedule_loops(indptr, indices, tag_host, host_tag_start,
                           host_tag_list):
    n = indptr.shape[0] - 1
    t_total = tag_host.shape[0]
    slot_of = np.full(t_total, -1, dtype=np.int64)
    carrier_of = np.full(t_total, -1, dtype=np.int64)
    next_ptr = host_tag_start[:-1].copy()
    pending_cnt = np.empty(n, dtype=np.int64)
    for h in range(n):
        pending_cnt[h] = host_tag_start[h + 1] - host_tag_start[h]
    interrogating = np.zeros(n, dtype=np.bool_)
    carrier_active = np.zeros(n, dtype=np.bool_)
    host_blocked = np.zeros(n, dtype=np.bool_)
    carrier_banned = np.zeros(n, dtype=np.bool_)
    pending_total = t_total
    slot = 0
    while pending_total > 0:
        for v in range(n):
            interrogating[v] = False
            carrier_active[v] = False
            host_blocked[v] = False
            carrier_banned[v] = False
        progressed = 0
        while True:
            best_w = -1
            best_score = 0
            for w in range(n):
                if interrogating[w] or carrier_active[w] or carrier_banned[w]:
                    continue
                score = 0
                for j in range(indptr[w], indptr[w + 1]):
                    h = indices[j]
                    if (pending_cnt[h] > 0 and not interrogating[h]
                            and not host_blocked[h] and not carrier_active[h]):
                        score += 1
                if score > best_score:
                    best_score = score
                    best_w = w
            if best_score == 0:
                break
            w = best_w
            carrier_active[w] = True
            for j in range(indptr[w], indptr[w + 1]):
                h = indices[j]
                if (pending_cnt[h] > 0 and not interrogating[h]
                        and not host_blocked[h] and not carrier_active[h]):
                    interrogating[h] = True
                    tag_idx = host_tag_list[next_ptr[h]]
                    next_ptr[h] += 1
                    pending_cnt[h] -= 1
                    pending_total -= 1
                    progressed += 1
                    slot_of[tag_idx] = slot
                    carrier_of[tag_idx] = w
                    for jj in range(indptr[h], indptr[h + 1]):
                        carrier_banned[indices[jj]] = True
            for j in range(indptr[w], indptr[w + 1]):
                host_blocked[indices[j]] = True
        if progressed == 0:
            return slot_of, carrier_of, -1
        slot += 1
    return slot_of, carrier_of, slot


def _greedy_schedule_numpy(indptr, indices, tag_host, host_tag_start,
                           host_tag_list):
    """Dense-matrix formulation of the same greedy rule."""
    n = indptr.shape[0] - 1
    t_total = tag_host.shape[0]
    adj = np.zeros((n, n), dtype=bool)
    for u in range(n):
        adj[u, indices[indptr[u]:indptr[u + 1]]] = True
    slot_of = np.full(t_total, -1, dtype=np.int64)
    carrier_of = np.full(t_total, -1, dtype=np.int64)
    next_ptr = host_tag_start[:-1].copy()
    pending_cnt = (host_tag_start[1:] - host_tag_start[:-1]).astype(np.int64)
    pending_total = t_total
    slot = 0
    while pending_total > 0:
        interrogating = np.zeros(n, dtype=bool)
        carrier_active = np.zeros(n, dtype=bool)
        host_blocked = np.zeros(n, dtype=bool)
        carrier_banned = np.zeros(n, dtype=bool)
        progressed = 0
        while True:
            eligible = ((pending_cnt > 0) & ~interrogating
                        & ~host_blocked & ~carrier_active)
            scores = adj[:, eligible].sum(axis=1)
            scores[interrogating | carrier_active | carrier_banned] = 0
            w = int(np.argmax(scores))  # first max = lowest node id
            if scores[w] == 0:
                break
            covered = np.flatnonzero(adj[w] & eligible)
            carrier_active[w] = True
            for h in covered:
                interrogating[h] = True
                tag_idx = host_tag_list[next_ptr[h]]
                next_ptr[h] += 1
                pending_cnt[h] -= 1
                pending_total -= 1
                progressed += 1
                slot_of[tag_idx] = slot
                carrier_of[tag_idx] = w
            if covered.size:
                carrier_banned |= adj[:, covered].any(axis=1)
            host_blocked |= adj[w]
        if progressed == 0:
            return slot_of, carrier_of, -1
        slot += 1
    return slot_of, carrier_of, slot


# ---------------------------------------------------------------------------
# Dispatch

if NUMBA_ACTIVE:
    _jacobi_eigvals_jit = _njit(cache=True)(_jacobi_eigvals_loops)
    _partition_dp_jit = _njit(cache=True)(_partition_dp_loops)
    _greedy_schedule_jit = _njit(cache=True)(_greedy_schedule_loops)
    jacobi_eigvals = _jacobi_eigvals_jit
    partition_dp = _partition_dp_jit
    greedy_schedule = _greedy_schedule_jit
else:
    _jacobi_eigvals_jit = None
    _partition_dp_jit = None
    _greedy_schedule_jit = None
    jacobi_eigvals = _jacobi_eigvals_numpy
    partition_dp = _partition_dp_loops
    greedy_schedule = _greedy_schedule_numpy
