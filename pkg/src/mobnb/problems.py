"""Benchmark mixed-integer bi-objective problem definitions and their registry.

Five problems ship: gear, brake, truss, mela and tong.  Two further problems
from the same family (ball-bearing pivot link, bolted-rim coupling) are omitted
because their objectives and constraints depend on catalogue lookup tables of
prefabricated sizes whose numeric contents are not publicly available; they
cannot be reconstructed without inventing data.

All problems minimize both objectives.  Inequality constraints are stored in
canonical ``c >= 0`` form; the aggregated violation of a point is
``sum(max(0, -c_j))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from mobnb.core import VariableVector

SQRT2 = math.sqrt(2.0)


class EvaluationError(RuntimeError):
    """A problem evaluation produced a non-finite objective."""


@dataclass(frozen=True)
class VariableDomain:
    """One decision variable: continuous box, integer range, discrete value set
    or binary flag.  Discrete variables are addressed by index into ``values``."""

    kind: str  # "continuous" | "integer" | "discrete" | "binary"
    lo: float = 0.0
    hi: float = 0.0
    values: tuple = ()

    def __post_init__(self):
        if self.kind not in ("continuous", "integer", "discrete", "binary"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.kind == "discrete":
            if not self.values:
                raise ValueError("discrete domain needs a nonempty value set")
            if list(self.values) != sorted(set(self.values)):
                raise ValueError("discrete values must be sorted and duplicate-free")
        elif self.lo > self.hi:
            raise ValueError(f"empty domain [{self.lo}, {self.hi}]")

    @staticmethod
    def continuous(lo: float, hi: float) -> "VariableDomain":
        return VariableDomain("continuous", float(lo), float(hi))

    @staticmethod
    def integer(lo: int, hi: int) -> "VariableDomain":
        return VariableDomain("integer", int(lo), int(hi))

    @staticmethod
    def discrete(values: Sequence[float]) -> "VariableDomain":
        return VariableDomain("discrete", 0, len(values) - 1, tuple(values))

    @staticmethod
    def binary() -> "VariableDomain":
        return VariableDomain("binary", 0, 1)

    @property
    def is_continuous(self) -> bool:
        return self.kind == "continuous"

    def encoded_bounds(self) -> tuple:
        """Integer search range: value bounds for integer/binary, index bounds
        for discrete sets."""
        if self.kind == "discrete":
            return (0, len(self.values) - 1)
        return (int(self.lo), int(self.hi))


@dataclass(frozen=True)
class ProblemSpec:
    """A bi-objective mixed-integer problem: domains plus a vectorized evaluator.

    ``raw(X, Yv) -> (F, G)`` takes continuous values X (n, n_c) and decoded
    integer/discrete values Yv (n, n_e) and returns objectives F (n, p) and
    canonical inequality constraint values G (n, m_ineq), all float arrays.
    """

    name: str
    domains: tuple
    raw: Callable
    p: int = 2
    m_ineq: int = 0
    m_eq: int = 0

    @property
    def continuous_domains(self) -> tuple:
        return tuple(d for d in self.domains if d.is_continuous)

    @property
    def integer_domains(self) -> tuple:
        return tuple(d for d in self.domains if not d.is_continuous)

    @property
    def n_continuous(self) -> int:
        return len(self.continuous_domains)

    @property
    def n_integer(self) -> int:
        return len(self.integer_domains)

    def continuous_bounds(self) -> tuple:
        doms = self.continuous_domains
        lo = np.array([d.lo for d in doms], dtype=float)
        hi = np.array([d.hi for d in doms], dtype=float)
        return lo, hi

    def integer_bounds(self) -> tuple:
        """Encoded (lo, hi) int arrays, one entry per integer-like variable."""
        pairs = [d.encoded_bounds() for d in self.integer_domains]
        lo = np.array([p[0] for p in pairs], dtype=np.int64)
        hi = np.array([p[1] for p in pairs], dtype=np.int64)
        return lo, hi

    def decode_integer(self, Y: np.ndarray) -> np.ndarray:
        """Map encoded integers (set indices for discrete variables) to values."""
        Y = np.asarray(Y, dtype=np.int64)
        out = Y.astype(float)
        for k, dom in enumerate(self.integer_domains):
            if dom.kind == "discrete":
                out[:, k] = np.asarray(dom.values, dtype=float)[Y[:, k]]
        return out

    def batch_evaluate(self, X: np.ndarray, Y: np.ndarray) -> tuple:
        """Vectorized evaluation: (objectives (n, p), violations (n,)).

        Inputs are assumed in-domain; use :meth:`evaluate` for checked access.
        """
        Y = np.asarray(Y, dtype=np.int64)
        Y = Y.reshape(len(Y), self.n_integer)
        if X is None or np.size(X) == 0:
            X = np.zeros((len(Y), 0))
        X = np.asarray(X, dtype=float).reshape(len(Y), self.n_continuous)
        Yv = self.decode_integer(Y)
        F, G = self.raw(X, Yv)
        if G.size:
            viol = np.maximum(0.0, -G).sum(axis=1)
        else:
            viol = np.zeros(len(F))
        return F, viol

    def evaluate(self, v: VariableVector) -> tuple:
        """Checked single-point evaluation: (objective tuple, violation)."""
        self._check_domain(v)
        X = np.array([v.continuous], dtype=float)
        Y = np.array([v.integer], dtype=np.int64)
        F, viol = self.batch_evaluate(X, Y)
        if not np.isfinite(F[0]).all():
            raise EvaluationError(f"non-finite objective {tuple(F[0])} at {v} in problem {self.name!r}")
        return tuple(float(f) for f in F[0]), float(viol[0])

    def _check_domain(self, v: VariableVector):
        if len(v.continuous) != self.n_continuous or len(v.integer) != self.n_integer:
            raise ValueError(
                f"{self.name!r} expects {self.n_continuous} continuous and "
                f"{self.n_integer} integer variables, got "
                f"{len(v.continuous)}/{len(v.integer)}"
            )
        for x, dom in zip(v.continuous, self.continuous_domains):
            if not dom.lo <= x <= dom.hi:
                raise ValueError(f"continuous value {x} outside [{dom.lo}, {dom.hi}] in {self.name!r}")
        for y, dom in zip(v.integer, self.integer_domains):
            lo, hi = dom.encoded_bounds()
            if int(y) != y or not lo <= y <= hi:
                raise ValueError(f"integer value {y} outside [{lo}, {hi}] in {self.name!r}")


def evaluate(problem: ProblemSpec, v: VariableVector) -> tuple:
    """Module-level alias for :meth:`ProblemSpec.evaluate`."""
    return problem.evaluate(v)


# ---------------------------------------------------------------------------
# Gear train: four tooth counts, pure integer, unconstrained.
# f1 = 1/6.931 - ((z1*z2)/(z3*z4))^2, f2 = max(z).


def _gear_raw(X, Yv):
    z1, z2, z3, z4 = Yv[:, 0], Yv[:, 1], Yv[:, 2], Yv[:, 3]
    ratio = (z1 * z2) / (z3 * z4)
    f1 = 1.0 / 6.931 - ratio**2
    f2 = Yv.max(axis=1)
    return np.column_stack([f1, f2]), np.empty((len(Yv), 0))


def make_gear() -> ProblemSpec:
    return ProblemSpec(
        name="gear",
        domains=tuple(VariableDomain.integer(12, 60) for _ in range(4)),
        raw=_gear_raw,
    )


# ---------------------------------------------------------------------------
# Disk brake: outer radius x1, actuating force x2, friction-surface count x3
# (continuous here), inner radius y1 (integer).  The published ratios share the
# factor (x1 - y1); they are evaluated in factored form so the evaluation stays
# total on the box, where x1 == y1 is reachable (the raw form is 0/0 there).


def _brake_raw(X, Yv):
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    y1 = Yv[:, 0]
    d = x1 - y1
    s = x1 + y1
    q = x1 * x1 + x1 * y1 + y1 * y1  # (x1^3 - y1^3) / (x1 - y1)
    f1 = 4.9e-5 * (d * s) * (x3 - 1.0)
    f2 = 9.82e6 * s / (x2 * x3 * q)
    with np.errstate(divide="ignore"):
        g1 = d - 20.0
        g2 = 30.0 - 2.5 * (x3 + 1.0)
        g3 = 0.4 - x2 / (np.pi * d * s)
        g4 = 1.0 - 2.22e-3 * x2 * q / (d * s * s)
        g5 = 2.66e-2 * x2 * x3 * q / s - 900.0
    return np.column_stack([f1, f2]), np.column_stack([g1, g2, g3, g4, g5])


def make_brake() -> ProblemSpec:
    return ProblemSpec(
        name="brake",
        domains=(
            VariableDomain.continuous(75, 110),
            VariableDomain.continuous(1000, 3000),
            VariableDomain.continuous(2, 20),
            VariableDomain.integer(55, 80),
        ),
        raw=_brake_raw,
        m_ineq=5,
    )


# ---------------------------------------------------------------------------
# Nine-bar truss: member areas, volume vs displacement, unconstrained.
# Diagonal members A4, A6, A8 have length sqrt(2).


_TRUSS_SET = (1.0, 5.0, 10.0, 15.0)
_TRUSS_CLO = (2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


def _truss_raw(X, Yv):
    a1, a2, a3 = X[:, 0], X[:, 1], X[:, 2]
    a4, a5, a6 = Yv[:, 0], Yv[:, 1], Yv[:, 2]
    a7, a8, a9 = Yv[:, 3], Yv[:, 4], Yv[:, 5]
    f1 = a1 + a2 + a3 + SQRT2 * a4 + a5 + SQRT2 * a6 + a7 + SQRT2 * a8 + a9
    f2 = (
        4.0 / a1
        + 1.0 / a2
        + 1.0 / a3
        + 8.0 * SQRT2 / a4
        + 4.0 / a5
        + 2.0 * SQRT2 / a6
        + 4.0 / a7
        + 2.0 * SQRT2 / a8
    )
    return np.column_stack([f1, f2]), np.empty((len(X), 0))


def make_truss() -> ProblemSpec:
    return ProblemSpec(
        name="truss",
        domains=tuple(VariableDomain.continuous(c, 10) for c in _TRUSS_CLO)
        + tuple(VariableDomain.discrete(_TRUSS_SET) for _ in range(6)),
        raw=_truss_raw,
    )


# ---------------------------------------------------------------------------
# Mela: mildly nonlinear quadratic over 2 continuous + 8 binary variables,
# unconstrained, with a disconnected minimal set.

_MELA_G = np.array(
    [
        [1, -1, 2, 0, 0, 0, 0, 0, 0, 0],
        [-1, 2, 0, 0, 2, 0, 0, 0, 0, 0],
        [0, 0, 3, 0, 2, 0, 0, 0, 0, 0],
        [2, 0, 0, 4, 0, 2, 0, 2, 0, 0],
        [0, 0, 0, 0, 5, 2, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 6, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 7, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 2, 0, 0, 0, 0],
        [0, 2, 0, 0, 0, 0, 0, 0, 0, 10],
    ],
    dtype=float,
)
_MELA_C1 = np.array([-1, -1, 1, -10, 0, 1, -2, 0, 3, 0], dtype=float)
_MELA_C2 = np.array([1, 2, -1, 1, 5, -2, 0, 6, 0, -3], dtype=float)


def _mela_raw(X, Yv):
    Z = np.hstack([X, Yv])
    f1 = 0.5 * np.einsum("ni,ij,nj->n", Z, _MELA_G, Z) + Z @ _MELA_C1
    f2 = Z @ _MELA_C2
    return np.column_stack([f1, f2]), np.empty((len(X), 0))


def make_mela() -> ProblemSpec:
    return ProblemSpec(
        name="mela",
        domains=tuple(VariableDomain.continuous(-1, 1) for _ in range(2))
        + tuple(VariableDomain.binary() for _ in range(8)),
        raw=_mela_raw,
    )


# ---------------------------------------------------------------------------
# Tong: 3 continuous + 3 binary variables, 9 linear/quadratic inequalities.
# Two transcription fixes relative to the published text: g1 drops a stray
# closing parenthesis, and the g2 token "x2 9x3" is read as "x2 - 9x3"
# (set g2_plus_9x3=True for the "+9x3" reading).


def _tong_raw_signed(X, Yv, g2_sign):
    x1, x2, x3 = X[:, 0], X[:, 1], X[:, 2]
    y1, y2, y3 = Yv[:, 0], Yv[:, 1], Yv[:, 2]
    f1 = x1 * x1 - x2 + x3 + 3.0 * y1 + 2.0 * y2 + y3
    f2 = 2.0 * x1 * x1 + x2 - 3.0 * x3 - 2.0 * y1 + y2 - 2.0 * y3
    g1 = -(3.0 * x1 - x2 + x3 + 2.0 * y1)
    g2 = 40.0 - (4.0 * x1 * x1 + 2.0 * x1 + x2 + g2_sign * 9.0 * x3 + y1 + 7.0 * y2)
    g3 = -(-x1 - 2.0 * x2 + 3.0 * x3 + 7.0 * y3)
    g4 = 10.0 - (-x1 + 12.0 * y1)
    g5 = 5.0 - (x1 - 2.0 * y1)
    g6 = 20.0 - (-x2 + y2)
    g7 = 40.0 - (x2 - y2)
    g8 = 17.0 - (-x3 + y3)
    g9 = 25.0 - (x3 - y3)
    return (
        np.column_stack([f1, f2]),
        np.column_stack([g1, g2, g3, g4, g5, g6, g7, g8, g9]),
    )


def _tong_raw_minus(X, Yv):
    return _tong_raw_signed(X, Yv, -1.0)


def _tong_raw_plus(X, Yv):
    return _tong_raw_signed(X, Yv, +1.0)


def make_tong(g2_plus_9x3: bool = False) -> ProblemSpec:
    return ProblemSpec(
        name="tong",
        domains=tuple(VariableDomain.continuous(-100, 100) for _ in range(3))
        + tuple(VariableDomain.binary() for _ in range(3)),
        raw=_tong_raw_plus if g2_plus_9x3 else _tong_raw_minus,
        m_ineq=9,
    )


# ---------------------------------------------------------------------------


def registry() -> list:
    """All shipped benchmark problems, in a stable order."""
    return [make_gear(), make_brake(), make_truss(), make_mela(), make_tong()]


def get_problem(name: str) -> ProblemSpec:
    for prob in registry():
        if prob.name == name:
            return prob
    known = ", ".join(p.name for p in registry())
    raise KeyError(f"unknown problem {name!r} (available: {known})")


def restrict(problem: ProblemSpec, integer_bounds: Sequence[tuple]) -> ProblemSpec:
    """A copy of ``problem`` with narrowed integer-variable encoded bounds.

    Useful for desk-scale experiments on truncated integer lattices.
    """
    bounds = list(integer_bounds)
    if len(bounds) != problem.n_integer:
        raise ValueError("one (lo, hi) pair per integer variable required")
    new_domains = []
    it = iter(bounds)
    for dom in problem.domains:
        if dom.is_continuous:
            new_domains.append(dom)
            continue
        lo, hi = next(it)
        old_lo, old_hi = dom.encoded_bounds()
        if not (old_lo <= lo <= hi <= old_hi):
            raise ValueError(f"[{lo}, {hi}] is not a sub-range of [{old_lo}, {old_hi}]")
        if dom.kind == "discrete":
            new_domains.append(VariableDomain.discrete(dom.values[lo : hi + 1]))
        else:
            new_domains.append(VariableDomain(dom.kind, lo, hi))
    return replace(problem, domains=tuple(new_domains))
