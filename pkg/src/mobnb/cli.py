"""Command line front end.

Subcommands: ``run`` (seeded experiment repetitions against a cached true
front), ``oracle`` (build and cache a true front), ``metrics`` (score one
front CSV against another) and ``compare`` (investment ratio between two
exported experiment directories).

Solver settings come from an INI file: an ``[nsga2]`` section for the plain
solver, ``[bnb]`` plus nested ``[bnb.root]``/``[bnb.node]``/``[bnb.leaf]``
sections for the hybrid, and an optional ``[oracle]`` section.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

from mobnb import harness, oracle
from mobnb.bnb import BnbConfig
from mobnb.metrics import compute_report, front_from_csv, front_to_csv
from mobnb.nsga2 import Nsga2Config
from mobnb.oracle import OracleConfig
from mobnb.problems import get_problem, registry


def _nsga2_from_section(sec) -> Nsga2Config:
    generations = sec.getint("generations")
    if sec.getint("population") is None or generations is None:
        raise ValueError(f"section [{sec.name}] needs 'population' and 'generations'")
    return Nsga2Config(
        population_size=sec.getint("population"),
        max_generations=generations,
        stall_generations=sec.getint("stall", fallback=generations),
        crossover_probability=sec.getfloat("crossover", fallback=0.9),
        mutation_probability=sec.getfloat("mutation", fallback=0.95),
        eta_c=sec.getfloat("eta_c", fallback=100.0),
        eta_m=sec.getfloat("eta_m", fallback=10.0),
    )


def _bnb_from_config(parser: configparser.ConfigParser) -> BnbConfig:
    for name in ("bnb.root", "bnb.node", "bnb.leaf"):
        if name not in parser:
            raise ValueError(f"bnb solver config needs a [{name}] section")
    kwargs = {}
    if "bnb" in parser:
        sec = parser["bnb"]
        if sec.get("max_nodes") is not None:
            kwargs["max_nodes"] = sec.getint("max_nodes")
        kwargs["fathoming"] = sec.getboolean("fathoming", fallback=True)
        kwargs["node_selection"] = sec.get("node_selection", fallback="depth_first")
    return BnbConfig(
        root=_nsga2_from_section(parser["bnb.root"]),
        node=_nsga2_from_section(parser["bnb.node"]),
        leaf=_nsga2_from_section(parser["bnb.leaf"]),
        **kwargs,
    )


def _oracle_from_config(parser: configparser.ConfigParser, grid_override=None, epsilon_override=None):
    kwargs = {}
    cache_dir = None
    if "oracle" in parser:
        sec = parser["oracle"]
        if sec.get("grid") is not None:
            kwargs["continuous_grid_points"] = sec.getint("grid")
        if sec.get("epsilon") is not None:
            kwargs["epsilon"] = sec.getfloat("epsilon")
        if sec.get("max_enumeration") is not None:
            kwargs["max_enumeration"] = sec.getint("max_enumeration")
        cache_dir = sec.get("cache_dir", fallback=None)
    if grid_override is not None:
        kwargs["continuous_grid_points"] = grid_override
    if epsilon_override is not None:
        kwargs["epsilon"] = epsilon_override
    return OracleConfig(**kwargs), cache_dir


def load_config(path) -> configparser.ConfigParser:
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise FileNotFoundError(f"config file not found: {path}")
    return parser


def cmd_run(args) -> int:
    parser = load_config(args.config)
    problem = get_problem(args.problem)
    oracle_cfg, cache_dir = _oracle_from_config(parser)
    cache_dir = Path(cache_dir) if cache_dir else Path(args.out) / "oracle"
    true = oracle.true_front(problem, oracle_cfg, cache_dir)

    nsga2_cfg = bnb_cfg = None
    if args.solver == "nsga2":
        if "nsga2" not in parser:
            raise ValueError("nsga2 solver config needs an [nsga2] section")
        nsga2_cfg = _nsga2_from_section(parser["nsga2"])
    else:
        bnb_cfg = _bnb_from_config(parser)

    combo_id = parser.get("experiment", "id", fallback="0")
    cfg = harness.ExperimentConfig(
        problem=args.problem,
        solver=args.solver,
        combo_id=combo_id,
        repetitions=args.reps,
        base_seed=args.seed,
        nsga2=nsga2_cfg,
        bnb=bnb_cfg,
        oracle=oracle_cfg,
    )
    records = harness.run_experiment(cfg, true)
    try:
        summary = harness.summarize(records)
    except ValueError:
        summary = None
        print("warning: every repetition failed; no summary written", file=sys.stderr)
    harness.export(records, summary, None, args.out, true_front=true)
    n_failed = sum(r.failed for r in records)
    print(f"{args.out}/runs.csv: {len(records)} runs, {n_failed} failed")
    return 0


def cmd_oracle(args) -> int:
    problem = get_problem(args.problem)
    oracle_cfg = OracleConfig(
        continuous_grid_points=args.grid,
        epsilon=args.epsilon,
        max_enumeration=args.max_enumeration,
    )
    front = oracle.true_front(problem, oracle_cfg, cache_dir=args.out)
    stable = Path(args.out) / f"{problem.name}-true.csv"
    front_to_csv(front, stable)
    print(f"{stable}: {len(front)} points")
    return 0


def cmd_metrics(args) -> int:
    approx = front_from_csv(args.approx)
    true = front_from_csv(args.true, source="true")
    report = compute_report(approx, true, evaluations=0)
    print(report.to_json())
    return 0


def cmd_compare(args) -> int:
    baseline = json.loads((Path(args.baseline) / "summary.json").read_text())
    candidate = json.loads((Path(args.candidate) / "summary.json").read_text())
    result = harness.compare(baseline, candidate)
    text = json.dumps(result, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    names = ", ".join(p.name for p in registry())
    ap = argparse.ArgumentParser(prog="mobnb", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run repeated seeded experiments")
    run.add_argument("--problem", required=True, help=f"one of: {names}")
    run.add_argument("--solver", required=True, choices=list(harness.SOLVERS))
    run.add_argument("--config", required=True, help="INI solver configuration")
    run.add_argument("--reps", type=int, default=20)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", required=True, help="output directory")
    run.set_defaults(func=cmd_run)

    orc = sub.add_parser("oracle", help="build and cache a true Pareto front")
    orc.add_argument("--problem", required=True, help=f"one of: {names}")
    orc.add_argument("--grid", type=int, default=101, help="grid points per continuous variable")
    orc.add_argument("--epsilon", type=float, default=1e-4, help="uniform resampling step")
    orc.add_argument("--max-enumeration", type=int, default=100_000_000)
    orc.add_argument("--out", required=True, help="output directory")
    orc.set_defaults(func=cmd_oracle)

    met = sub.add_parser("metrics", help="score an approximate front against a true front")
    met.add_argument("--approx", required=True, help="approximate front CSV (f1,f2)")
    met.add_argument("--true", required=True, help="true front CSV (f1,f2)")
    met.set_defaults(func=cmd_metrics)

    cmp_ = sub.add_parser("compare", help="investment ratio between two experiment exports")
    cmp_.add_argument("--baseline", required=True, help="baseline export directory")
    cmp_.add_argument("--candidate", required=True, help="candidate export directory")
    cmp_.add_argument("--out", help="optional path for comparison.json")
    cmp_.set_defaults(func=cmd_compare)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
