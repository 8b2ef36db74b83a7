"""Multi-criteria branch-and-bound with NSGA-II bounding at every node.

The tree branches the integer variables level by level: at depth j the j-th
integer takes each value of its current range, one child per value.  Every
child is bounded by an NSGA-II run restricted to its integer box (a separate
tuning for root, internal nodes and leaves), its optimistic ideal point is
tested against the incumbent archive, and retained children contribute their
non-dominated points to the incumbent.  Leaves with no free continuous
variable collapse to a single evaluation.

The ideal point of a heuristic bound is not a certified lower bound: NSGA-II
can miss a node's true minima, so fathoming may prune regions that contain
Pareto-optimal points.  That risk is inherent to the method; disable
``fathoming`` for exhaustive (complete) enumeration of the tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from mobnb.core import (
    ParetoArchive,
    Solution,
    VariableVector,
    archive_merge,
    dominates,
    ideal_point,
)
from mobnb.nsga2 import Nsga2Config, run_nsga2
from mobnb.problems import ProblemSpec

NODE_SELECTION_STRATEGIES = ("depth_first",)  # "best_first" reserved


@dataclass
class Node:
    """One subproblem: a narrowed integer box at a given branching depth."""

    level: int
    lower: tuple
    upper: tuple
    status: str = "open"  # open | leaf | fathomed | infeasible | solved
    archive: ParetoArchive | None = None
    ideal: tuple | None = None

    def __post_init__(self):
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("node with empty integer box")
        if self.is_leaf and self.status == "open":
            self.status = "leaf"

    @property
    def is_leaf(self) -> bool:
        return all(lo == hi for lo, hi in zip(self.lower, self.upper))


@dataclass(frozen=True)
class BnbConfig:
    root: Nsga2Config
    node: Nsga2Config
    leaf: Nsga2Config
    max_nodes: int | None = None  # None: leaf count, capped at 10_000
    node_selection: str = "depth_first"
    seed: int = 0
    fathoming: bool = True

    def __post_init__(self):
        if self.max_nodes is not None and self.max_nodes < 1:
            raise ValueError("max_nodes must be >= 1")
        if self.node_selection not in NODE_SELECTION_STRATEGIES:
            raise ValueError(
                f"unknown node selection {self.node_selection!r}; "
                f"available: {NODE_SELECTION_STRATEGIES}"
            )


@dataclass
class BnbStats:
    nodes_created: int = 0
    nodes_fathomed: int = 0
    nodes_infeasible: int = 0
    nodes_branched: int = 0
    leaves_solved: int = 0
    nodes_unprocessed: int = 0
    processed: int = 0
    total_evaluations: int = 0
    truncated: bool = False
    #: one (population_size, evaluations) pair per solver invocation
    invocations: list = field(default_factory=list)


def root_node(problem: ProblemSpec) -> Node:
    lo, hi = problem.integer_bounds()
    return Node(level=0, lower=tuple(int(v) for v in lo), upper=tuple(int(v) for v in hi))


def default_max_nodes(problem: ProblemSpec) -> int:
    lo, hi = problem.integer_bounds()
    leaves = int(np.prod((hi - lo + 1).astype(object)))
    return min(leaves, 10_000)


def branch(node: Node, problem: ProblemSpec) -> list:
    """All children of an internal node: the level-j integer pinned to each
    value of its current range.  The children partition the parent box.

    Children are emitted from the upper value downwards, the order the tree
    walk consumes them: wide-range subtrees then tend to deliver strongly
    dominating incumbent points before their lower-value siblings are tested,
    which makes ideal-point fathoming bite much earlier.
    """
    if node.is_leaf or node.level >= problem.n_integer:
        raise ValueError("cannot branch a leaf node")
    j = node.level
    children = []
    for v in range(node.upper[j], node.lower[j] - 1, -1):
        lower = node.lower[:j] + (v,) + node.lower[j + 1 :]
        upper = node.upper[:j] + (v,) + node.upper[j + 1 :]
        children.append(Node(level=j + 1, lower=lower, upper=upper))
    return children


def _solve_fixed_point(node: Node, problem: ProblemSpec) -> ParetoArchive:
    """A pure-integer leaf has exactly one candidate: evaluate it directly."""
    Y = np.array([node.lower], dtype=np.int64)
    F, viol = problem.batch_evaluate(None, Y)
    sol = Solution(
        vars=VariableVector(continuous=(), integer=tuple(int(v) for v in node.lower)),
        objectives=tuple(float(f) for f in F[0]),
        violation=float(viol[0]),
    )
    return ParetoArchive(members=[sol], evaluations=1, feasible=sol.violation <= 0.0)


def bound(node: Node, problem: ProblemSpec, cfg: BnbConfig, seed: int | None = None) -> Node:
    """Bound a node in place: run the level-appropriate NSGA-II restricted to
    the node's integer box, store its archive and ideal point.

    A node whose solver finds no feasible point is marked ``infeasible``.
    """
    if node.is_leaf:
        engine_cfg = cfg.leaf
    elif node.level == 0:
        engine_cfg = cfg.root
    else:
        engine_cfg = cfg.node
    if node.is_leaf and problem.n_continuous == 0:
        archive = _solve_fixed_point(node, problem)
    else:
        if seed is not None:
            engine_cfg = replace(engine_cfg, seed=seed)
        archive = run_nsga2(problem, engine_cfg, domains_override=list(zip(node.lower, node.upper)))
    node.archive = archive
    node.ideal = ideal_point([m.objectives for m in archive.members]) if archive.members else None
    if not archive.feasible:
        node.status = "infeasible"
    return node


def should_retain(node_ideal: Sequence[float], incumbent: ParetoArchive) -> bool:
    """Keep a node unless some incumbent member dominates its ideal point."""
    return not any(dominates(m.objectives, node_ideal) for m in incumbent.members)


def _derive_seed(base: int, k: int) -> int:
    seq = np.random.SeedSequence([base & 0xFFFFFFFFFFFFFFFF, k])
    return int(seq.generate_state(1, np.uint64)[0])


def _record(stats: BnbStats, archive: ParetoArchive, pop_size: int) -> None:
    stats.total_evaluations += archive.evaluations
    stats.invocations.append((pop_size, archive.evaluations))


def solve(problem: ProblemSpec, cfg: BnbConfig) -> tuple:
    """Run the full branch-and-bound loop; returns (incumbent archive, stats).

    Children are generated one at a time from the deepest open node, bounded,
    fathom-tested against the incumbent, and merged when retained.  Leaves are
    dropped from the open list once solved.  The walk stops when the open list
    empties or ``max_nodes`` children have been processed (sets ``truncated``).
    """
    stats = BnbStats()
    s_max = cfg.max_nodes if cfg.max_nodes is not None else default_max_nodes(problem)

    root = root_node(problem)
    stats.nodes_created += 1
    k = 0
    bound(root, problem, cfg, seed=_derive_seed(cfg.seed, k))
    k += 1
    _record(stats, root.archive, 1 if (root.is_leaf and problem.n_continuous == 0) else cfg.root.population_size)

    incumbent = ParetoArchive(members=list(root.archive.members) if root.archive.feasible else [])
    if root.is_leaf:
        root.status = "solved" if root.archive.feasible else root.status
        stats.leaves_solved += root.archive.feasible
        final = ParetoArchive(
            members=incumbent.members or list(root.archive.members),
            evaluations=stats.total_evaluations,
            feasible=root.archive.feasible,
        )
        return final, stats

    # stack entries: [node, next branch value], consumed downwards from the
    # upper bound (see branch()); only the top entry can be exhausted
    stack = [[root, root.upper[0]]]
    while stack:
        while stack and stack[-1][1] < stack[-1][0].lower[stack[-1][0].level]:
            stack.pop()
            stats.nodes_branched += 1
        if not stack:
            break
        if stats.processed >= s_max:
            stats.truncated = True
            break
        node, v = stack[-1]
        stack[-1][1] -= 1
        j = node.level
        child = Node(
            level=j + 1,
            lower=node.lower[:j] + (v,) + node.lower[j + 1 :],
            upper=node.upper[:j] + (v,) + node.upper[j + 1 :],
        )
        stats.nodes_created += 1
        is_fixed_point = child.is_leaf and problem.n_continuous == 0
        bound(child, problem, cfg, seed=_derive_seed(cfg.seed, k))
        k += 1
        stats.processed += 1
        pop = 1 if is_fixed_point else (cfg.leaf if child.is_leaf else cfg.node).population_size
        _record(stats, child.archive, pop)

        if child.status == "infeasible":
            stats.nodes_fathomed += 1
            stats.nodes_infeasible += 1
            continue
        if cfg.fathoming and not should_retain(child.ideal, incumbent):
            child.status = "fathomed"
            stats.nodes_fathomed += 1
            continue
        incumbent = archive_merge(incumbent, child.archive.members)
        if child.is_leaf:
            child.status = "solved"
            stats.leaves_solved += 1
        else:
            stack.append([child, child.upper[child.level]])

    stats.nodes_unprocessed = len(stack)

    if incumbent.members:
        final = ParetoArchive(members=incumbent.members, evaluations=stats.total_evaluations, feasible=True)
    else:
        # nothing feasible anywhere: fall back to the root's least-violation set
        final = ParetoArchive(
            members=list(root.archive.members),
            evaluations=stats.total_evaluations,
            feasible=False,
        )
    return final, stats
