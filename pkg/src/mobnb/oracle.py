"""Reference ("true") Pareto fronts by exhaustive enumeration.

Pipeline: (1) evaluate every integer combination crossed with a regular grid
over the continuous variables and keep the feasible non-dominated points,
recording which integer combinations contribute; (2) densify the front of each
contributing combination with a fine local grid around its coarse Pareto
points (a self-contained stand-in for exact scalarization solves, exact for
pure-integer problems); (3) re-discretize each continuous section of the front
at a uniform Euclidean step via natural cubic interpolation, then Pareto-refine.

Enumeration is embarrassingly parallel over integer combinations; set
MOBNB_WORKERS to use process workers.  Output is deterministic regardless of
worker count.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from mobnb.core import non_dominated_2d, non_dominated_indices
from mobnb.metrics import Front, front_from_csv, front_to_csv
from mobnb.problems import ProblemSpec

_BLOCK_ROWS = 1 << 19
_REFINE_GRID = 21  # local window grid per continuous variable
_GAP_SPLIT_FACTOR = 10.0  # section break: gap > factor * median gap
_MAX_RESAMPLED = 20_000_000


class CapacityError(RuntimeError):
    """The requested enumeration or resampling exceeds the configured budget."""


def worker_count() -> int:
    return max(1, int(os.environ.get("MOBNB_WORKERS", "1")))


@dataclass(frozen=True)
class OracleConfig:
    continuous_grid_points: int = 101
    epsilon: float = 1e-4
    max_enumeration: int = 100_000_000

    def __post_init__(self):
        if self.continuous_grid_points < 2:
            raise ValueError("continuous_grid_points must be >= 2")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.max_enumeration < 1:
            raise ValueError("max_enumeration must be >= 1")


@dataclass
class EnumerationResult:
    """Surviving non-dominated points with their variable assignments."""

    objectives: np.ndarray  # (n, 2)
    X: np.ndarray  # (n, n_c) continuous values
    Y: np.ndarray  # (n, n_e) encoded integer values
    contributing: list  # integer combinations present in the front
    evaluations: int

    def front(self, source: str = "true") -> Front:
        return Front(points=self.objectives, source=source)


def _filter_rows(F: np.ndarray) -> np.ndarray:
    if F.shape[1] == 2:
        return non_dominated_2d(F)
    return non_dominated_indices(F)


def _continuous_mesh(problem: ProblemSpec, grid_points: int) -> np.ndarray:
    if problem.n_continuous == 0:
        return np.zeros((1, 0))
    lo, hi = problem.continuous_bounds()
    axes = [np.linspace(lo[k], hi[k], grid_points) for k in range(len(lo))]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.column_stack([m.ravel() for m in mesh])


def _enumerate_block(problem: ProblemSpec, grid_points: int, start: int, stop: int):
    """Evaluate combos [start, stop) x grid; return feasible local survivors."""
    i_lo, i_hi = problem.integer_bounds()
    sizes = tuple(int(s) for s in (i_hi - i_lo + 1))
    idx = np.arange(start, stop, dtype=np.int64)
    multi = np.unravel_index(idx, sizes)
    combos = np.column_stack([i_lo[d] + multi[d] for d in range(len(sizes))]).astype(np.int64)
    mesh = _continuous_mesh(problem, grid_points)
    m = len(mesh)
    Y = np.repeat(combos, m, axis=0)
    X = np.tile(mesh, (len(combos), 1))
    F, viol = problem.batch_evaluate(X, Y)
    feas = viol <= 0.0
    F, X, Y = F[feas], X[feas], Y[feas]
    keep = _filter_rows(F)
    return F[keep], X[keep], Y[keep]


def enumerate_true_front(problem: ProblemSpec, cfg: OracleConfig) -> EnumerationResult:
    """Grid-enumerate the whole mixed lattice and keep the global front.

    Raises :class:`CapacityError` when the lattice exceeds ``max_enumeration``.
    """
    i_lo, i_hi = problem.integer_bounds()
    sizes = (i_hi - i_lo + 1).astype(object)
    n_combos = int(np.prod(sizes)) if len(sizes) else 1
    rows_per_combo = cfg.continuous_grid_points ** problem.n_continuous
    total = n_combos * rows_per_combo
    if total > cfg.max_enumeration:
        raise CapacityError(
            f"enumerating {problem.name!r} needs {total} evaluations "
            f"({n_combos} integer combinations x {rows_per_combo} grid points); "
            f"cap is {cfg.max_enumeration}"
        )

    block = max(1, _BLOCK_ROWS // max(1, rows_per_combo))
    ranges = [(s, min(s + block, n_combos)) for s in range(0, n_combos, block)]
    workers = worker_count()
    parts = []
    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(
                pool.map(
                    _enumerate_block_args,
                    [(problem, cfg.continuous_grid_points, a, b) for a, b in ranges],
                )
            )
    else:
        parts = [_enumerate_block(problem, cfg.continuous_grid_points, a, b) for a, b in ranges]

    F = np.vstack([p[0] for p in parts])
    X = np.vstack([p[1] for p in parts])
    Y = np.vstack([p[2] for p in parts])
    keep = _filter_rows(F)
    F, X, Y = F[keep], X[keep], Y[keep]
    contributing = _unique_rows_in_order(Y)
    return EnumerationResult(objectives=F, X=X, Y=Y, contributing=contributing, evaluations=total)


def _enumerate_block_args(args):
    return _enumerate_block(*args)


def _unique_rows_in_order(Y: np.ndarray) -> list:
    seen = set()
    out = []
    for row in Y:
        key = tuple(int(v) for v in row)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def refine_continuous_sections(
    result: EnumerationResult, problem: ProblemSpec, cfg: OracleConfig
) -> EnumerationResult:
    """Densify the conditional front of every contributing integer combination
    with a fine grid around each coarse Pareto point, then re-filter.

    Identity for pure-integer problems, where enumeration is already exact.
    """
    n_c = problem.n_continuous
    if n_c == 0 or len(result.objectives) == 0:
        return result
    lo, hi = problem.continuous_bounds()
    h = (hi - lo) / (cfg.continuous_grid_points - 1)
    axes = [np.linspace(-h[k], h[k], _REFINE_GRID) for k in range(n_c)]
    mesh = np.meshgrid(*axes, indexing="ij")
    offsets = np.column_stack([m.ravel() for m in mesh])

    new_F, new_X, new_Y = [result.objectives], [result.X], [result.Y]
    added = 0
    for combo in result.contributing:
        sel = (result.Y == np.asarray(combo, dtype=np.int64)).all(axis=1)
        centers = result.X[sel]
        if not len(centers):
            continue
        pts = (centers[:, None, :] + offsets[None, :, :]).reshape(-1, n_c)
        pts = np.clip(pts, lo, hi)
        Yb = np.tile(np.asarray(combo, dtype=np.int64), (len(pts), 1))
        for s in range(0, len(pts), _BLOCK_ROWS):
            Xc = pts[s : s + _BLOCK_ROWS]
            Yc = Yb[s : s + _BLOCK_ROWS]
            F, viol = problem.batch_evaluate(Xc, Yc)
            added += len(F)
            feas = viol <= 0.0
            F, Xc, Yc = F[feas], Xc[feas], Yc[feas]
            keep = _filter_rows(F)
            new_F.append(F[keep])
            new_X.append(Xc[keep])
            new_Y.append(Yc[keep])

    F = np.vstack(new_F)
    X = np.vstack(new_X)
    Y = np.vstack(new_Y)
    keep = _filter_rows(F)
    F, X, Y = F[keep], X[keep], Y[keep]
    return EnumerationResult(
        objectives=F,
        X=X,
        Y=Y,
        contributing=_unique_rows_in_order(Y),
        evaluations=result.evaluations + added,
    )


# ---------------------------------------------------------------------------
# Uniform re-discretization


def _split_sections(pts: np.ndarray) -> list:
    """Split a front (sorted by f1) where a gap exceeds 10x the median gap."""
    if len(pts) < 2:
        return [pts]
    gaps = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    med = float(np.median(gaps))
    if med <= 0.0:
        return [pts]
    cuts = np.flatnonzero(gaps > _GAP_SPLIT_FACTOR * med) + 1
    return [sec for sec in np.split(pts, cuts)]


def _resample_section(sec: np.ndarray, epsilon: float) -> np.ndarray:
    if len(sec) <= 3:
        return sec
    if len(np.unique(sec[:, 0])) != len(sec):
        warnings.warn("degenerate front section with duplicate f1 values; passed through")
        return sec
    chord = np.linalg.norm(np.diff(sec, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(chord)])
    length = float(s[-1])
    if length <= 0.0:
        return sec
    n_gaps = max(1, math.ceil(length / epsilon))
    if n_gaps + 1 > _MAX_RESAMPLED:
        raise CapacityError(
            f"resampling a section of length {length:g} at epsilon={epsilon:g} "
            f"would produce {n_gaps + 1} points; raise epsilon"
        )
    t = np.linspace(0.0, length, n_gaps + 1)
    fx = CubicSpline(s, sec[:, 0], bc_type="natural")
    fy = CubicSpline(s, sec[:, 1], bc_type="natural")
    return np.column_stack([fx(t), fy(t)])


def uniform_resample(front, epsilon: float) -> Front:
    """Re-discretize each continuous section at a constant Euclidean step.

    Sections of three or fewer points (discrete parts of the front) pass
    through unchanged; the result is Pareto-refined.
    """
    pts = front.points if isinstance(front, Front) else np.asarray(front, dtype=float)
    if len(pts) == 0:
        return Front(points=pts, source="true")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    pts = pts[order]
    pieces = [_resample_section(sec, epsilon) for sec in _split_sections(pts)]
    total = sum(len(p) for p in pieces)
    if total > _MAX_RESAMPLED:
        raise CapacityError(f"resampled front would hold {total} points; raise epsilon")
    out = np.vstack(pieces)
    keep = _filter_rows(out)
    return Front(points=out[keep], source="true")


# ---------------------------------------------------------------------------
# Cached pipeline


def _config_signature(problem: ProblemSpec, cfg: OracleConfig) -> str:
    payload = {
        "problem": problem.name,
        "domains": [
            [d.kind, float(d.lo), float(d.hi), list(d.values)] for d in problem.domains
        ],
        "grid": cfg.continuous_grid_points,
        "epsilon": cfg.epsilon,
        "refine_grid": _REFINE_GRID,
    }
    digest = hashlib.sha1(json.dumps(payload, sort_keys=True).encode()).hexdigest()
    return digest[:12]


def true_front(
    problem: ProblemSpec,
    cfg: OracleConfig,
    cache_dir=None,
    resample: bool | None = None,
) -> Front:
    """Full pipeline with CSV caching keyed by problem + oracle configuration.

    ``resample`` defaults to True exactly when the problem has continuous
    variables (pure-integer fronts are exact point sets and left untouched).
    """
    if resample is None:
        resample = problem.n_continuous > 0
    cache_path = meta_path = None
    if cache_dir is not None:
        tag = _config_signature(problem, cfg)
        cache_dir = Path(cache_dir)
        cache_dir.mkdir(parents=True, exist_ok=True)
        cache_path = cache_dir / f"{problem.name}-{tag}.csv"
        meta_path = cache_dir / f"{problem.name}-{tag}.json"
        if cache_path.exists():
            return front_from_csv(cache_path, source="true")

    result = enumerate_true_front(problem, cfg)
    result = refine_continuous_sections(result, problem, cfg)
    front = uniform_resample(result.front(), cfg.epsilon) if resample else result.front()

    if cache_path is not None:
        front_to_csv(front, cache_path)
        lo, hi = problem.continuous_bounds()
        pitch = (
            ((hi - lo) / (cfg.continuous_grid_points - 1) / (_REFINE_GRID - 1) * 2).tolist()
            if problem.n_continuous
            else []
        )
        meta_path.write_text(
            json.dumps(
                {
                    "problem": problem.name,
                    "points": len(front),
                    "evaluations": result.evaluations,
                    "grid": cfg.continuous_grid_points,
                    "epsilon": cfg.epsilon,
                    "refined_pitch": pitch,
                    "contributing": [list(c) for c in result.contributing],
                },
                indent=2,
            )
            + "\n"
        )
    return front
