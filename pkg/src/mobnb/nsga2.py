"""NSGA-II over mixed continuous/integer box domains.

The engine works on numpy arrays internally: continuous genes X (N, n_c) and
encoded integer genes Y (N, n_e).  Discrete-set variables are evolved in index
space and decoded by the problem at evaluation time.  Constraint handling is
feasibility-first domination, applied both in the mating tournament and in
environmental selection.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from mobnb.core import ParetoArchive, Solution, VariableVector, _domination_matrix, pareto_filter
from mobnb.problems import ProblemSpec, VariableDomain


@dataclass(frozen=True)
class Nsga2Config:
    population_size: int
    max_generations: int
    stall_generations: int
    crossover_probability: float = 0.9
    mutation_probability: float = 0.95
    eta_c: float = 100.0
    eta_m: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if self.population_size <= 0 or self.population_size % 2:
            raise ValueError("population_size must be positive and even")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")
        if not 1 <= self.stall_generations <= self.max_generations:
            raise ValueError("stall_generations must be in [1, max_generations]")
        for name in ("crossover_probability", "mutation_probability"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.eta_c <= 0 or self.eta_m <= 0:
            raise ValueError("distribution indices must be positive")


@dataclass
class _Space:
    """Search box: continuous bounds plus encoded integer bounds."""

    c_lo: np.ndarray
    c_hi: np.ndarray
    i_lo: np.ndarray
    i_hi: np.ndarray

    @property
    def n_genes(self) -> int:
        return len(self.c_lo) + len(self.i_lo)


def _space_from_domains(domains: Sequence[VariableDomain], override=None) -> _Space:
    c_lo = np.array([d.lo for d in domains if d.is_continuous], dtype=float)
    c_hi = np.array([d.hi for d in domains if d.is_continuous], dtype=float)
    pairs = [d.encoded_bounds() for d in domains if not d.is_continuous]
    i_lo = np.array([p[0] for p in pairs], dtype=np.int64)
    i_hi = np.array([p[1] for p in pairs], dtype=np.int64)
    if override is not None:
        override = list(override)
        if len(override) != len(pairs):
            raise ValueError("override must give one (lo, hi) per integer variable")
        o_lo = np.array([p[0] for p in override], dtype=np.int64)
        o_hi = np.array([p[1] for p in override], dtype=np.int64)
        if ((o_lo < i_lo) | (o_hi > i_hi) | (o_lo > o_hi)).any():
            raise ValueError("override may only narrow the integer bounds")
        i_lo, i_hi = o_lo, o_hi
    return _Space(c_lo, c_hi, i_lo, i_hi)


# ---------------------------------------------------------------------------
# Ranking and crowding


def _rank_matrix(F: np.ndarray, V: np.ndarray | None) -> np.ndarray:
    """Front ranks by iterated peeling of a full domination matrix (any p)."""
    n = len(F)
    dom = _domination_matrix(F, V)
    n_dominators = dom.sum(axis=0).astype(np.int64)
    rank = np.full(n, -1, dtype=np.int64)
    k = 0
    current = np.flatnonzero(n_dominators == 0)
    while current.size:
        rank[current] = k
        n_dominators -= dom[current].sum(axis=0)
        current = np.flatnonzero((rank < 0) & (n_dominators == 0))
        k += 1
    return rank


def _rank_2d(F: np.ndarray) -> np.ndarray:
    """Front ranks for an unconstrained bi-objective set in O(n log n).

    Sweep in (f1, f2) order keeping, per existing front, the smallest f2 seen
    and the f1 of the point that set it; a point joins the first front whose
    kept point does not dominate it (binary search: domination by front k
    implies domination by every earlier front).
    """
    n = len(F)
    order = np.lexsort((F[:, 1], F[:, 0]))
    f1 = F[order, 0]
    f2 = F[order, 1]
    rank = np.empty(n, dtype=np.int64)
    tail_f2: list = []
    tail_f1: list = []
    for pos in range(n):
        x = f1[pos]
        y = f2[pos]
        lo, hi = 0, len(tail_f2)
        while lo < hi:
            mid = (lo + hi) // 2
            t = tail_f2[mid]
            if t < y or (t == y and tail_f1[mid] < x):
                lo = mid + 1
            else:
                hi = mid
        if lo == len(tail_f2):
            tail_f2.append(y)
            tail_f1.append(x)
        elif y < tail_f2[lo]:
            tail_f2[lo] = y
            tail_f1[lo] = x
        rank[order[pos]] = lo
    return rank


def _fronts_from_rank(rank: np.ndarray) -> list:
    idx = np.argsort(rank, kind="stable")
    counts = np.bincount(rank)
    return np.split(idx, np.cumsum(counts)[:-1])


def _sort_fronts(F: np.ndarray, V: np.ndarray | None) -> tuple:
    """Constrained fast non-dominated sort: (rank array, list of index arrays).

    Feasible points are ranked by objective domination alone; infeasible
    points always rank behind every feasible front, grouped by violation.
    """
    n = len(F)
    if V is not None and not (V > 0).any():
        V = None
    if V is None:
        rank = _rank_2d(F) if F.shape[1] == 2 else _rank_matrix(F, None)
        return rank, _fronts_from_rank(rank)
    if F.shape[1] != 2:
        rank = _rank_matrix(F, V)
        return rank, _fronts_from_rank(rank)
    rank = np.empty(n, dtype=np.int64)
    feas = np.flatnonzero(V <= 0)
    infeas = np.flatnonzero(V > 0)
    base = 0
    if feas.size:
        rank_f = _rank_2d(F[feas])
        rank[feas] = rank_f
        base = int(rank_f.max()) + 1
    _, group = np.unique(V[infeas], return_inverse=True)
    rank[infeas] = base + group
    return rank, _fronts_from_rank(rank)


def _crowding(F: np.ndarray) -> np.ndarray:
    """Crowding distances for one mutually non-dominated front.

    Duplicated objective vectors share one distance, which keeps the result
    invariant under permutations of the front.
    """
    m, p = F.shape
    uniq, inverse = np.unique(F, axis=0, return_inverse=True)
    u = len(uniq)
    d = np.zeros(u)
    if u <= 2:
        d[:] = np.inf
        return d[inverse]
    for k in range(p):
        order = np.lexsort(np.vstack([np.delete(uniq, k, axis=1).T, uniq[:, k]]))
        vals = uniq[order, k]
        span = vals[-1] - vals[0]
        d[order[0]] = np.inf
        d[order[-1]] = np.inf
        if span > 0:
            d[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return d[inverse]


def _crowding_by_front(F: np.ndarray, fronts) -> np.ndarray:
    crowd = np.zeros(len(F))
    for front in fronts:
        crowd[front] = _crowding(F[front])
    return crowd


def non_dominated_sort(pop: Sequence[Solution]) -> list:
    """Fronts of indices under constrained domination; front k+1 is dominated
    only from fronts 1..k."""
    if not pop:
        raise ValueError("cannot sort an empty population")
    F = np.array([s.objectives for s in pop], dtype=float)
    V = np.array([s.violation for s in pop], dtype=float)
    _, fronts = _sort_fronts(F, V)
    return [list(front) for front in fronts]


def crowding_distance(front: Sequence[Solution]) -> list:
    """Crowding distances of a mutually non-dominated front (inf at extremes)."""
    F = np.array([s.objectives for s in front], dtype=float)
    return [float(x) for x in _crowding(F)]


# ---------------------------------------------------------------------------
# Variation operators


def _sbx_pairs(P1, P2, lo, hi, eta, pair_mask, rng, integral):
    """Simulated binary crossover on paired gene matrices, clipped to bounds."""
    m, n = P1.shape
    if n == 0:
        return P1.copy(), P2.copy()
    gene_mask = pair_mask[:, None] & (rng.random((m, n)) <= 0.5)
    u = rng.random((m, n))
    exponent = 1.0 / (eta + 1.0)
    beta = np.where(u <= 0.5, (2.0 * u) ** exponent, (1.0 / (2.0 * (1.0 - u))) ** exponent)
    c1 = 0.5 * ((1.0 + beta) * P1 + (1.0 - beta) * P2)
    c2 = 0.5 * ((1.0 - beta) * P1 + (1.0 + beta) * P2)
    C1 = np.where(gene_mask, c1, P1)
    C2 = np.where(gene_mask, c2, P2)
    if integral:
        C1 = np.rint(C1)
        C2 = np.rint(C2)
    C1 = np.clip(C1, lo, hi)
    C2 = np.clip(C2, lo, hi)
    return C1, C2


def _sbx_batch(X1, X2, Y1, Y2, space: _Space, cfg: Nsga2Config, rng):
    pair_mask = rng.random(len(X1)) <= cfg.crossover_probability
    CX1, CX2 = _sbx_pairs(X1, X2, space.c_lo, space.c_hi, cfg.eta_c, pair_mask, rng, integral=False)
    CY1, CY2 = _sbx_pairs(
        Y1.astype(float), Y2.astype(float), space.i_lo, space.i_hi, cfg.eta_c, pair_mask, rng, integral=True
    )
    return CX1, CX2, CY1.astype(np.int64), CY2.astype(np.int64)


def _mutate_batch(X, Y, space: _Space, cfg: Nsga2Config, rng):
    n_genes = space.n_genes
    if n_genes == 0:
        return X, Y
    rate = cfg.mutation_probability / n_genes
    if X.shape[1]:
        mask = rng.random(X.shape) < rate
        u = rng.random(X.shape)
        exponent = 1.0 / (cfg.eta_m + 1.0)
        delta = np.where(u < 0.5, (2.0 * u) ** exponent - 1.0, 1.0 - (2.0 * (1.0 - u)) ** exponent)
        span = space.c_hi - space.c_lo
        X = np.where(mask, np.clip(X + delta * span, space.c_lo, space.c_hi), X)
    if Y.shape[1]:
        mask = rng.random(Y.shape) < rate
        draw = rng.integers(space.i_lo, space.i_hi + 1, size=Y.shape)
        Y = np.where(mask, draw, Y)
    return X, Y


def _split_vector(v: VariableVector):
    X = np.array([v.continuous], dtype=float)
    Y = np.array([v.integer], dtype=np.int64)
    return X, Y


def _join_vector(X, Y) -> VariableVector:
    return VariableVector(
        continuous=tuple(float(x) for x in X[0]),
        integer=tuple(int(y) for y in Y[0]),
    )


def sbx_crossover(a: VariableVector, b: VariableVector, domains, cfg: Nsga2Config, rng) -> tuple:
    """SBX on one parent pair.  Continuous genes recombine with index eta_c;
    integer genes recombine real-coded and round half-even; results are clipped
    into the domain box."""
    space = _space_from_domains(domains)
    Xa, Ya = _split_vector(a)
    Xb, Yb = _split_vector(b)
    CX1, CX2, CY1, CY2 = _sbx_batch(Xa, Xb, Ya, Yb, space, cfg, rng)
    return _join_vector(CX1, CY1), _join_vector(CX2, CY2)


def mutate(v: VariableVector, domains, cfg: Nsga2Config, rng) -> VariableVector:
    """Per-gene mutation at rate mutation_probability/n: polynomial moves for
    continuous genes, uniform resampling for integer and discrete genes."""
    space = _space_from_domains(domains)
    X, Y = _split_vector(v)
    X, Y = _mutate_batch(X, Y, space, cfg, rng)
    return _join_vector(X, Y)


# ---------------------------------------------------------------------------
# Main loop


def _tournament(rank, crowd, cand):
    a, b = cand[:, 0], cand[:, 1]
    b_wins = (rank[b] < rank[a]) | ((rank[b] == rank[a]) & (crowd[b] > crowd[a]))
    return np.where(b_wins, b, a)


def _environmental_selection(F, V, N):
    """Survivor indices from a combined population, plus their carried-over
    ranks and crowding distances (reused by the next mating tournament)."""
    rank_all, fronts = _sort_fronts(F, V)
    crowd_all = np.zeros(len(F))
    chosen = []
    for front in fronts:
        crowd_all[front] = _crowding(F[front])
        if len(chosen) + len(front) <= N:
            chosen.extend(front.tolist())
            if len(chosen) == N:
                break
            continue
        order = np.argsort(-crowd_all[front], kind="stable")
        need = N - len(chosen)
        chosen.extend(front[order[:need]].tolist())
        break
    keep = np.array(chosen, dtype=np.int64)
    return keep, rank_all[keep], crowd_all[keep]


def _front_signature(rows: np.ndarray) -> bytes:
    """Canonical byte form of an objective-vector set (sorted, deduplicated)."""
    return np.unique(np.ascontiguousarray(rows), axis=0).tobytes()


def run_nsga2(
    problem: ProblemSpec,
    cfg: Nsga2Config,
    domains_override=None,
    on_generation: Callable | None = None,
) -> ParetoArchive:
    """Run the generational loop and return the filtered final first front.

    ``domains_override`` narrows the encoded integer bounds (the branch-and-
    bound hook).  Termination: ``max_generations`` reached, or the first
    front's objective-vector set unchanged for ``stall_generations``
    consecutive generations.  The archive's evaluation count is exactly
    population_size * (1 + generations_executed).

    If no feasible point is ever seen the archive holds the least-violation
    non-dominated set and is flagged ``feasible=False``.
    """
    space = _space_from_domains(problem.domains, domains_override)
    rng = np.random.default_rng(cfg.seed)
    N = cfg.population_size

    X = space.c_lo + rng.random((N, len(space.c_lo))) * (space.c_hi - space.c_lo)
    Y = (
        rng.integers(space.i_lo, space.i_hi + 1, size=(N, len(space.i_lo)))
        if len(space.i_lo)
        else np.zeros((N, 0), dtype=np.int64)
    )
    F, V = problem.batch_evaluate(X, Y)

    rank, fronts = _sort_fronts(F, V)
    crowd = _crowding_by_front(F, fronts)
    prev_sig = _front_signature(F[fronts[0]])
    stall = 0
    generations = 0

    for gen in range(1, cfg.max_generations + 1):
        cand = rng.integers(0, N, size=(N, 2))
        parents = _tournament(rank, crowd, cand)
        p1, p2 = parents[0::2], parents[1::2]
        CX1, CX2, CY1, CY2 = _sbx_batch(X[p1], X[p2], Y[p1], Y[p2], space, cfg, rng)
        CX = np.vstack([CX1, CX2])
        CY = np.vstack([CY1, CY2])
        CX, CY = _mutate_batch(CX, CY, space, cfg, rng)
        CF, CV = problem.batch_evaluate(CX, CY)
        generations = gen

        X_all = np.vstack([X, CX])
        Y_all = np.vstack([Y, CY])
        F_all = np.vstack([F, CF])
        V_all = np.concatenate([V, CV])
        keep, rank, crowd = _environmental_selection(F_all, V_all, N)
        X, Y, F, V = X_all[keep], Y_all[keep], F_all[keep], V_all[keep]

        # survivors of the combined front 1 are exactly the new population's
        # front 1, so the carried ranks stay valid for the next tournament
        first = np.flatnonzero(rank == 0)
        sig = _front_signature(F[first])
        if on_generation is not None:
            on_generation(gen, F[first])
        if sig == prev_sig:
            stall += 1
            if stall >= cfg.stall_generations:
                break
        else:
            stall = 0
            prev_sig = sig

    first = np.flatnonzero(rank == 0)
    members = [
        Solution(
            vars=VariableVector(
                continuous=tuple(float(x) for x in X[i]),
                integer=tuple(int(y) for y in Y[i]),
            ),
            objectives=tuple(float(f) for f in F[i]),
            violation=float(V[i]),
        )
        for i in first
    ]
    feasible = [m for m in members if m.violation <= 0.0]
    archive_members = pareto_filter(feasible if feasible else members)
    return ParetoArchive(
        members=archive_members,
        evaluations=N * (1 + generations),
        feasible=bool(feasible),
    )
