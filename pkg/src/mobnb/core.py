"""Dominance relations, feasibility handling and the incumbent Pareto archive.

Everything here assumes minimization of every objective.  Problems stated as
maximization must be negated at definition time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

# An objective vector is a plain tuple of finite floats, one entry per objective.
ObjectiveVector = tuple


@dataclass(frozen=True)
class VariableVector:
    """A mixed assignment: continuous values plus integer values.

    For discrete-set variables the integer entry is the index into the set,
    not the catalogue value itself.
    """

    continuous: tuple = ()
    integer: tuple = ()


@dataclass(frozen=True)
class Solution:
    """A variable assignment with its cached objectives and constraint violation.

    ``violation`` is the sum of positive constraint violations; 0 means feasible.
    """

    vars: VariableVector
    objectives: tuple
    violation: float = 0.0


@dataclass
class ParetoArchive:
    """The incumbent non-dominated set, plus the evaluation count that produced it.

    ``feasible`` is False only for the degenerate outcome where no feasible
    point was found and the members are least-violation placeholders.
    """

    members: list = field(default_factory=list)
    evaluations: int = 0
    feasible: bool = True

    def objective_array(self) -> np.ndarray:
        return np.array([s.objectives for s in self.members], dtype=float)

    def __len__(self) -> int:
        return len(self.members)


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """Pareto dominance for minimization: a <= b everywhere and a < b somewhere."""
    if len(a) != len(b):
        raise ValueError(f"objective vectors of unequal length: {len(a)} vs {len(b)}")
    not_worse = all(x <= y for x, y in zip(a, b))
    return not_worse and any(x < y for x, y in zip(a, b))


def constrained_dominates(a: Solution, b: Solution) -> bool:
    """Feasibility-first domination: feasible beats infeasible, smaller violation
    beats larger, and objective dominance decides between feasible pairs."""
    a_feas = a.violation <= 0.0
    b_feas = b.violation <= 0.0
    if a_feas and not b_feas:
        return True
    if not a_feas and b_feas:
        return False
    if not a_feas and not b_feas:
        return a.violation < b.violation
    return dominates(a.objectives, b.objectives)


def _domination_matrix(F: np.ndarray, V: np.ndarray | None) -> np.ndarray:
    """dom[i, j] is True when point i constrained-dominates point j."""
    le = (F[:, None, :] <= F[None, :, :]).all(axis=-1)
    lt = (F[:, None, :] < F[None, :, :]).any(axis=-1)
    obj_dom = le & lt
    if V is None:
        return obj_dom
    feas = V <= 0.0
    both_feas = feas[:, None] & feas[None, :]
    both_inf = ~feas[:, None] & ~feas[None, :]
    return (
        (feas[:, None] & ~feas[None, :])
        | (both_inf & (V[:, None] < V[None, :]))
        | (both_feas & obj_dom)
    )


def _dominated_mask(F: np.ndarray, V: np.ndarray | None = None, chunk: int = 1024) -> np.ndarray:
    """Boolean mask of points constrained-dominated by some other point.

    Chunked over the candidate axis so large merges stay within memory.
    """
    n = len(F)
    out = np.zeros(n, dtype=bool)
    feas = None if V is None else (V <= 0.0)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        Fj = F[start:stop]
        le = (F[:, None, :] <= Fj[None, :, :]).all(axis=-1)
        lt = (F[:, None, :] < Fj[None, :, :]).any(axis=-1)
        dom = le & lt
        if feas is not None:
            Vj = V[start:stop]
            fj = feas[start:stop]
            both_feas = feas[:, None] & fj[None, :]
            both_inf = ~feas[:, None] & ~fj[None, :]
            dom = (
                (feas[:, None] & ~fj[None, :])
                | (both_inf & (V[:, None] < Vj[None, :]))
                | (both_feas & dom)
            )
        out[start:stop] = dom.any(axis=0)
    return out


def non_dominated_indices(F: np.ndarray, V: np.ndarray | None = None) -> np.ndarray:
    """Indices of the non-dominated rows of F, duplicates kept once (first wins),
    input order preserved."""
    F = np.asarray(F, dtype=float)
    if len(F) == 0:
        return np.array([], dtype=int)
    keep = ~_dominated_mask(F, V)
    idx = np.flatnonzero(keep)
    _, first = np.unique(F[idx], axis=0, return_index=True)
    return idx[np.sort(first)]


def non_dominated_2d(F: np.ndarray) -> np.ndarray:
    """Fast sweep for bi-objective arrays: same survivors as non_dominated_indices
    but O(n log n).  Used where fronts run to millions of points."""
    F = np.asarray(F, dtype=float)
    n = len(F)
    if n == 0:
        return np.array([], dtype=int)
    if F.shape[1] != 2:
        raise ValueError("non_dominated_2d requires exactly two objectives")
    idx = np.arange(n)
    order = np.lexsort((idx, F[:, 1], F[:, 0]))
    f1 = F[order, 0]
    f2 = F[order, 1]
    # First row of each equal-f1 group carries that group's smallest f2.
    group_start = np.empty(n, dtype=bool)
    group_start[0] = True
    group_start[1:] = f1[1:] != f1[:-1]
    starts = np.flatnonzero(group_start)
    best_before = np.concatenate(([np.inf], np.minimum.accumulate(f2[starts])[:-1]))
    keep_sorted = np.zeros(n, dtype=bool)
    keep_sorted[starts] = f2[starts] < best_before
    survivors = order[keep_sorted]
    return np.sort(survivors)


def pareto_filter(points: Sequence[Solution]) -> list:
    """The subset of ``points`` not constrained-dominated by any other input point.

    Identical objective vectors are kept once (first occurrence); the input
    order of survivors is preserved.
    """
    points = list(points)
    if not points:
        return []
    F = np.array([p.objectives for p in points], dtype=float)
    V = np.array([p.violation for p in points], dtype=float)
    return [points[i] for i in non_dominated_indices(F, V)]


def ideal_point(points: Iterable[Sequence[float]]) -> tuple:
    """Componentwise minimum of a nonempty collection of objective vectors."""
    arr = np.array(list(points), dtype=float)
    if arr.size == 0:
        raise ValueError("ideal_point of an empty set is undefined")
    return tuple(float(v) for v in arr.min(axis=0))


def archive_merge(archive: ParetoArchive, incoming: Sequence[Solution], evaluations: int = 0) -> ParetoArchive:
    """Merge new solutions into the incumbent: filter the union, accumulate cost."""
    members = pareto_filter(list(archive.members) + list(incoming))
    feasible = all(m.violation <= 0.0 for m in members)
    return ParetoArchive(
        members=members,
        evaluations=archive.evaluations + evaluations,
        feasible=feasible or not members,
    )
