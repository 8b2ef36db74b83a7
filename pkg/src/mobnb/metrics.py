"""Front quality indicators: cardinality, convergence, spread, investment ratio.

All indicators assume minimization and compare an approximation front S
against a reference ("true") front P in objective space.  Fronts travel as
2-column CSV files (header ``f1,f2``) between tools.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from scipy.spatial import cKDTree

from mobnb.core import non_dominated_2d, non_dominated_indices

#: Distances at or below this are treated as exact hits when a front was
#: discretized with the same step (applied identically to every solver).
SNAP_EPSILON = 1e-4


@dataclass
class Front:
    """A mutually non-dominated set of objective vectors with a source tag."""

    points: np.ndarray
    source: str = "approximate"  # or "true"

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        self.points = pts

    def __len__(self) -> int:
        return len(self.points)

    def validate(self) -> None:
        """Raise if the points are not mutually non-dominated."""
        keep = (
            non_dominated_2d(self.points)
            if self.points.shape[1] == 2
            else non_dominated_indices(self.points)
        )
        if len(keep) != len(self.points):
            raise ValueError(f"{len(self.points) - len(keep)} dominated points in front")


def _as_points(front) -> np.ndarray:
    if isinstance(front, Front):
        return front.points
    pts = np.atleast_2d(np.asarray(front, dtype=float))
    if pts.size == 0:
        pts = pts.reshape(0, 2)
    return pts


def front_to_csv(front, path) -> None:
    pts = _as_points(front)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["f1", "f2"])
        for row in pts:
            writer.writerow([repr(float(row[0])), repr(float(row[1]))])


def front_from_csv(path, source: str = "approximate") -> Front:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0][:2]] != ["f1", "f2"]:
        raise ValueError(f"{path}: expected header row 'f1,f2'")
    pts = np.array([[float(r[0]), float(r[1])] for r in rows[1:]], dtype=float)
    return Front(points=pts.reshape(-1, 2), source=source)


# ---------------------------------------------------------------------------
# Indicators


def onvg(S) -> int:
    """Cardinality of the approximation set."""
    return len(_as_points(S))


def purity(S, P) -> float:
    """Fraction of S surviving a joint non-dominance filter of S and P."""
    S_ = _as_points(S)
    P_ = _as_points(P)
    if len(S_) == 0:
        raise ValueError("purity of an empty approximation set is undefined")
    union = np.vstack([S_, P_])
    keep = non_dominated_2d(union) if union.shape[1] == 2 else non_dominated_indices(union)
    surviving = {tuple(row) for row in union[keep]}
    hits = sum(tuple(row) in surviving for row in S_)
    return hits / len(S_)


def _nearest_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Euclidean distance from each row of A to its nearest row of B."""
    d, _ = cKDTree(B).query(A)
    return np.atleast_1d(d)


def gd(S, P, snap_epsilon: float = SNAP_EPSILON) -> float:
    """Generational distance sqrt(sum d_i^2)/|S|, d_i from S to nearest of P.

    Distances <= snap_epsilon count as zero (discretization-step tolerance).
    """
    S_ = _as_points(S)
    P_ = _as_points(P)
    if len(S_) == 0 or len(P_) == 0:
        raise ValueError("gd requires nonempty fronts")
    d = _nearest_distances(S_, P_)
    d[d <= snap_epsilon] = 0.0
    return float(np.sqrt((d**2).sum()) / len(S_))


def igd(S, P, snap_epsilon: float = SNAP_EPSILON) -> float:
    """Inverted generational distance: distances measured from each true point
    to the nearest approximate point, averaged over |P|."""
    S_ = _as_points(S)
    P_ = _as_points(P)
    if len(S_) == 0 or len(P_) == 0:
        raise ValueError("igd requires nonempty fronts")
    d = _nearest_distances(P_, S_)
    d[d <= snap_epsilon] = 0.0
    return float(np.sqrt((d**2).sum()) / len(P_))


def _sorted_by_f1(pts: np.ndarray) -> np.ndarray:
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    return pts[order]


def spread(S, P) -> float:
    """Uniformity-plus-extent indicator Delta.

    d_f and d_l are the distances between the extreme (min-f1 / max-f1) points
    of S and the corresponding extremes of P; the remaining terms measure the
    deviation of consecutive gaps from their mean.
    """
    S_ = _as_points(S)
    P_ = _as_points(P)
    if len(S_) < 2:
        raise ValueError("spread requires at least two approximation points")
    if len(P_) == 0:
        raise ValueError("spread requires a nonempty reference front")
    S_ = _sorted_by_f1(S_)
    P_ = _sorted_by_f1(P_)
    d_f = float(np.linalg.norm(S_[0] - P_[0]))
    d_l = float(np.linalg.norm(S_[-1] - P_[-1]))
    gaps = np.linalg.norm(np.diff(S_, axis=0), axis=1)
    mean_gap = float(gaps.mean())
    numer = d_f + d_l + float(np.abs(gaps - mean_gap).sum())
    denom = d_f + d_l + (len(S_) - 1) * mean_gap
    if denom == 0.0:
        return 0.0
    return numer / denom


def relative_spread(S, P) -> float:
    """Absolute difference between the true front's own spread and the
    approximation's spread."""
    return abs(spread(P, P) - spread(S, P))


def investment_ratio(q: float, c: float) -> float:
    """Piecewise quality-per-cost indicator: q/c when q >= 1, else -c/q.

    Positive values mean the candidate improved quality; values >= 1 mean the
    improvement ratio beats the cost ratio.  q = inf maps to +inf.
    """
    if not c > 0:
        raise ValueError("cost ratio must be positive")
    if math.isnan(q) or q < 0:
        raise ValueError("quality ratio must be nonnegative")
    if q >= 1:
        return q / c
    return -c / q


def _mean_ratio(num: float, den: float) -> float:
    if num < 0 or den < 0:
        raise ValueError("quality means must be nonnegative")
    if den == 0.0:
        return math.inf if num > 0 else 1.0
    return num / den


def quality_ratio(gd_a: float, spread_a: float, gd_b: float, spread_b: float) -> float:
    """Geometric mean of the baseline/candidate ratios of GD and spread means.

    ``a`` is the baseline solver, ``b`` the candidate.  A zero candidate mean
    with a nonzero baseline mean yields inf (perfect-quality branch); 0/0
    counts as 1.
    """
    r_gd = _mean_ratio(gd_a, gd_b)
    r_sp = _mean_ratio(spread_a, spread_b)
    if math.isinf(r_gd) or math.isinf(r_sp):
        return math.inf
    return math.sqrt(r_gd * r_sp)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class MetricsReport:
    """All indicators for one solver run."""

    onvg: int
    purity: float
    gd: float
    igd: float
    spread: float
    relative_spread: float
    evaluations: int

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @staticmethod
    def from_json(text: str) -> "MetricsReport":
        return MetricsReport(**json.loads(text))


def compute_report(S, P, evaluations: int, snap_epsilon: float = SNAP_EPSILON) -> MetricsReport:
    """Evaluate every indicator of S against the reference front P."""
    return MetricsReport(
        onvg=onvg(S),
        purity=purity(S, P),
        gd=gd(S, P, snap_epsilon),
        igd=igd(S, P, snap_epsilon),
        spread=spread(S, P),
        relative_spread=relative_spread(S, P),
        evaluations=int(evaluations),
    )


def report_to_path(report: MetricsReport, path) -> None:
    Path(path).write_text(report.to_json() + "\n")
