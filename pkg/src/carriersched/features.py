"""Per-node input features and positional encodings for the GNN scheduler.

The base feature matrix has three columns per node: how many of the still
pending tags it hosts, its node id, and the minimum pending tag id it hosts
(0 when it hosts none; real tag ids start at 1 so the sentinel is
unambiguous). Id columns are scaled into [0, 1] so they keep their priority
ordering without dwarfing the other features at large N. One optional
positional-encoding column brings the width to 4.
"""

from __future__ import annotations

import enum
from typing import Iterable

import numpy as np

from . import accel
from .core import ProblemInstance, Topology
from .errors import NumericalError

EIG_TOL = 1e-10
EIG_MAX_SWEEPS = 100


class PeMode(enum.IntEnum):
    """Positional-encoding variant; values are the on-disk weight-file codes."""

    NONE = 0
    DEGREE = 1
    LAPLACIAN_EIGENVALUES = 2


def feature_dim(pe: PeMode) -> int:
    return 3 if pe is PeMode.NONE else 4


def node_degrees(topology: Topology) -> np.ndarray:
    """Degree of each node normalized by the maximum degree.

    A single isolated node has no edges; the zero vector is returned then.
    """
    deg = np.array([topology.degree(u) for u in range(topology.node_count)],
                   dtype=np.float64)
    dmax = deg.max()
    if dmax == 0.0:
        return deg
    return deg / dmax


def laplacian_eigenvalues(topology: Topology) -> np.ndarray:
    """Eigenvalues of the symmetric normalized Laplacian, ascending in [0, 1].

    L = I - D^{-1/2} A D^{-1/2}; the spectrum is normalized by its largest
    eigenvalue when that is nonzero. Solved with a cyclic Jacobi kernel
    (dense, symmetric); non-convergence within the sweep budget raises
    NumericalError.
    """
    n = topology.node_count
    if n == 1:
        return np.zeros(1, dtype=np.float64)
    a = topology.adjacency_matrix()
    deg = a.sum(axis=1)
    inv_sqrt = np.where(deg > 0, 1.0 / np.sqrt(np.maximum(deg, 1e-300)), 0.0)
    lap = np.eye(n) - (inv_sqrt[:, None] * a * inv_sqrt[None, :])
    lap = (lap + lap.T) / 2.0  # keep exactly symmetric for the rotations
    vals, converged = accel.jacobi_eigvals(lap, EIG_TOL, EIG_MAX_SWEEPS)
    if not converged:
        raise NumericalError(
            f"Jacobi eigensolver did not converge within {EIG_MAX_SWEEPS} sweeps")
    vals = np.sort(vals)
    top = vals[-1]
    if top > 0.0:
        vals = vals / top
    return np.clip(vals, 0.0, 1.0)


def build_feature_matrix(instance: ProblemInstance,
                         remaining_tags: Iterable[int],
                         pe: PeMode = PeMode.NONE) -> np.ndarray:
    """N x D feature matrix for the current iteration's pending tag set.

    remaining_tags must be a subset of the instance's tags; the topology is
    unchanged between iterations, only the tag columns shrink.
    """
    remaining = set(remaining_tags)
    host_of = instance.host_of
    for t in remaining:
        if t not in host_of:
            raise ValueError(f"remaining tag {t} not part of the instance")
    n = instance.node_count
    hosted = np.zeros(n, dtype=np.float64)
    min_tag = np.zeros(n, dtype=np.float64)  # sentinel 0 = hosts no pending tag
    for t in sorted(remaining, reverse=True):
        h = host_of[t]
        hosted[h] += 1.0
        min_tag[h] = float(t)
    node_ids = np.arange(n, dtype=np.float64)
    if n > 1:
        node_ids = node_ids / float(n - 1)
    min_tag = min_tag / float(instance.max_tag_id)
    columns = [hosted, node_ids, min_tag]
    if pe is PeMode.DEGREE:
        columns.append(node_degrees(instance.topology))
    elif pe is PeMode.LAPLACIAN_EIGENVALUES:
        columns.append(laplacian_eigenvalues(instance.topology))
    return np.column_stack(columns)
