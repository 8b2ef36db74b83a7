"""Benchmark harness: repeated seeded solver runs, distribution statistics
with 1.5*IQR outlier flagging, investment-ratio comparison and file export.

Repetition r of an experiment runs with seed ``base_seed + r`` and is scored
against a cached true front.  Failed repetitions are kept as flagged records
and excluded from statistics.  Runs are independent, so they can execute on
process workers (``MOBNB_WORKERS``); record order is always by repetition.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from mobnb.bnb import BnbConfig
from mobnb.bnb import solve as bnb_solve
from mobnb.metrics import (
    SNAP_EPSILON,
    Front,
    MetricsReport,
    compute_report,
    front_from_csv,
    front_to_csv,
    investment_ratio,
    quality_ratio,
)
from mobnb.nsga2 import Nsga2Config, run_nsga2
from mobnb.oracle import OracleConfig, worker_count
from mobnb.problems import ProblemSpec, get_problem

SOLVERS = ("nsga2", "bnb")

RUNS_CSV_COLUMNS = [
    "problem",
    "solver",
    "id",
    "rep",
    "seed",
    "onvg",
    "purity",
    "gd",
    "igd",
    "spread",
    "d_spread",
    "evals",
    "wall_ms",
    "failed",
]

SUMMARY_METRICS = ("onvg", "purity", "gd", "igd", "spread", "d_spread", "evals", "wall_ms")


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str | ProblemSpec
    solver: str
    combo_id: str = "0"
    repetitions: int = 20
    base_seed: int = 0
    nsga2: Nsga2Config | None = None
    bnb: BnbConfig | None = None
    oracle: OracleConfig = OracleConfig()
    snap_epsilon: float = SNAP_EPSILON

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.solver == "nsga2" and self.nsga2 is None:
            raise ValueError("nsga2 solver requires an Nsga2Config")
        if self.solver == "bnb" and self.bnb is None:
            raise ValueError("bnb solver requires a BnbConfig")

    @property
    def problem_name(self) -> str:
        return self.problem if isinstance(self.problem, str) else self.problem.name


@dataclass
class RunRecord:
    problem: str
    solver: str
    combo_id: str
    rep: int
    seed: int
    report: MetricsReport | None
    wall_ms: float
    failed: bool = False
    front: np.ndarray | None = None


def _resolve_problem(cfg: ExperimentConfig) -> ProblemSpec:
    return get_problem(cfg.problem) if isinstance(cfg.problem, str) else cfg.problem


def _solve_once(cfg: ExperimentConfig, seed: int):
    """One solver run: (front points, evaluation count, feasible flag)."""
    problem = _resolve_problem(cfg)
    if cfg.solver == "nsga2":
        archive = run_nsga2(problem, replace(cfg.nsga2, seed=seed))
        evaluations = archive.evaluations
        feasible = archive.feasible
    else:
        archive, stats = bnb_solve(problem, replace(cfg.bnb, seed=seed))
        evaluations = stats.total_evaluations
        feasible = archive.feasible
    return archive.objective_array(), evaluations, feasible


def _run_one(cfg: ExperimentConfig, rep: int, true_points: np.ndarray, clock=time.perf_counter) -> RunRecord:
    seed = cfg.base_seed + rep
    t0 = clock()
    report = None
    front = None
    failed = False
    try:
        front, evaluations, feasible = _solve_once(cfg, seed)
        if not feasible:
            raise RuntimeError("solver found no feasible point")
        report = compute_report(front, true_points, evaluations, cfg.snap_epsilon)
    except Exception:
        failed = True
        front = None
    wall_ms = (clock() - t0) * 1000.0
    return RunRecord(
        problem=cfg.problem_name,
        solver=cfg.solver,
        combo_id=str(cfg.combo_id),
        rep=rep,
        seed=seed,
        report=report,
        wall_ms=wall_ms,
        failed=failed,
        front=front,
    )


def _run_one_args(args) -> RunRecord:
    return _run_one(*args)


def run_experiment(
    cfg: ExperimentConfig,
    true_front,
    workers: int | None = None,
    clock=time.perf_counter,
) -> list:
    """All repetitions of one experiment, scored against ``true_front``.

    Deterministic for a fixed config: seeds are base_seed + repetition index.
    With workers > 1 repetitions run on processes (the custom ``clock`` only
    applies to the sequential path).
    """
    true_points = true_front.points if isinstance(true_front, Front) else np.asarray(true_front, dtype=float)
    workers = worker_count() if workers is None else max(1, workers)
    reps = range(cfg.repetitions)
    if workers > 1 and cfg.repetitions > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_one_args, [(cfg, rep, true_points) for rep in reps]))
    return [_run_one(cfg, rep, true_points, clock) for rep in reps]


# ---------------------------------------------------------------------------
# Statistics


def _distribution(values: np.ndarray) -> dict:
    """Five-number summary plus outliers by the 1.5*IQR fence rule; the mean
    is taken after removing flagged outliers.  Quartiles interpolate linearly."""
    q1, median, q3 = (float(q) for q in np.percentile(values, [25.0, 50.0, 75.0]))
    iqr = q3 - q1
    lo_fence = q1 - 1.5 * iqr
    hi_fence = q3 + 1.5 * iqr
    outlier_mask = (values < lo_fence) | (values > hi_fence)
    kept = values[~outlier_mask]
    return {
        "min": float(values.min()),
        "q1": q1,
        "median": median,
        "q3": q3,
        "max": float(values.max()),
        "mean": float(kept.mean()),
        "outliers": [float(v) for v in values[outlier_mask]],
        "n": int(len(values)),
    }


def _metric_value(record: RunRecord, metric: str) -> float:
    if metric == "wall_ms":
        return record.wall_ms
    report = record.report
    return {
        "onvg": report.onvg,
        "purity": report.purity,
        "gd": report.gd,
        "igd": report.igd,
        "spread": report.spread,
        "d_spread": report.relative_spread,
        "evals": report.evaluations,
    }[metric]


def summarize(records) -> dict:
    """Per-metric distribution summaries over the non-failed records."""
    records = list(records)
    ok = [r for r in records if not r.failed]
    if not ok:
        raise ValueError("summarize needs at least one non-failed record")
    first = ok[0]
    metrics = {
        metric: _distribution(np.array([_metric_value(r, metric) for r in ok], dtype=float))
        for metric in SUMMARY_METRICS
    }
    return {
        "problem": first.problem,
        "solver": first.solver,
        "id": first.combo_id,
        "n": len(records),
        "n_failed": len(records) - len(ok),
        "metrics": metrics,
    }


def classify_investment(ir: float) -> str:
    if math.isinf(ir) and ir > 0:
        return "best quality"
    if ir >= 1:
        return "good investment"
    if 0 < ir < 1:
        return "quality enhanced"
    if ir == -1:
        return "break-even"
    if -1 < ir <= 0:
        return "acceptable tradeoff"
    return "bad investment"


def compare(baseline: dict, candidate: dict) -> dict:
    """Investment ratio of a candidate summary against a baseline summary.

    Quality uses the outlier-cleaned means of gd and relative spread; cost is
    the ratio of mean evaluation counts.
    """
    eval_a = baseline["metrics"]["evals"]["mean"]
    eval_b = candidate["metrics"]["evals"]["mean"]
    if eval_a == 0:
        raise ValueError("baseline evaluation mean is zero")
    q = quality_ratio(
        baseline["metrics"]["gd"]["mean"],
        baseline["metrics"]["d_spread"]["mean"],
        candidate["metrics"]["gd"]["mean"],
        candidate["metrics"]["d_spread"]["mean"],
    )
    c = eval_b / eval_a
    ir = investment_ratio(q, c)
    return {
        "baseline": {k: baseline[k] for k in ("problem", "solver", "id")},
        "candidate": {k: candidate[k] for k in ("problem", "solver", "id")},
        "q": q,
        "c": c,
        "ir": ir,
        "classification": classify_investment(ir),
    }


# ---------------------------------------------------------------------------
# Export / import


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _record_row(r: RunRecord) -> list:
    rep = r.report
    return [
        r.problem,
        r.solver,
        r.combo_id,
        r.rep,
        r.seed,
        None if rep is None else rep.onvg,
        None if rep is None else rep.purity,
        None if rep is None else rep.gd,
        None if rep is None else rep.igd,
        None if rep is None else rep.spread,
        None if rep is None else rep.relative_spread,
        None if rep is None else rep.evaluations,
        r.wall_ms,
        r.failed,
    ]


def _front_filename(r: RunRecord) -> str:
    return f"front-{r.problem}-{r.solver}-{r.combo_id}-rep{r.rep}.csv"


def export(records, summaries, comparisons, out_dir, true_front=None) -> None:
    """Write runs.csv (fixed column order), summary.json, comparison.json and
    per-run front CSVs under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "runs.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUNS_CSV_COLUMNS)
        for r in records:
            writer.writerow([_format_cell(v) for v in _record_row(r)])
    if summaries is not None:
        (out / "summary.json").write_text(json.dumps(summaries, indent=2) + "\n")
    if comparisons is not None:
        (out / "comparison.json").write_text(json.dumps(comparisons, indent=2) + "\n")
    fronts = out / "fronts"
    wrote_fronts = False
    for r in records:
        if r.front is not None and len(r.front):
            fronts.mkdir(exist_ok=True)
            wrote_fronts = True
            front_to_csv(r.front, fronts / _front_filename(r))
    if true_front is not None and records:
        fronts.mkdir(exist_ok=True)
        front_to_csv(true_front, fronts / f"true-{records[0].problem}.csv")


def import_runs(out_dir) -> list:
    """Rebuild RunRecords from an export directory (inverse of :func:`export`)."""
    out = Path(out_dir)
    with open(out / "runs.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != RUNS_CSV_COLUMNS:
        raise ValueError(f"{out / 'runs.csv'}: unexpected header")
    records = []
    for row in rows[1:]:
        cells = dict(zip(RUNS_CSV_COLUMNS, row))
        failed = cells["failed"] == "1"
        report = None
        if not failed and cells["onvg"] != "":
            report = MetricsReport(
                onvg=int(cells["onvg"]),
                purity=float(cells["purity"]),
                gd=float(cells["gd"]),
                igd=float(cells["igd"]),
                spread=float(cells["spread"]),
                relative_spread=float(cells["d_spread"]),
                evaluations=int(cells["evals"]),
            )
        record = RunRecord(
            problem=cells["problem"],
            solver=cells["solver"],
            combo_id=cells["id"],
            rep=int(cells["rep"]),
            seed=int(cells["seed"]),
            report=report,
            wall_ms=float(cells["wall_ms"]),
            failed=failed,
        )
        front_path = out / "fronts" / _front_filename(record)
        if front_path.exists():
            record.front = front_from_csv(front_path).points
        records.append(record)
    return records
