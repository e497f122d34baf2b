"""Command-line harness: generate instances, solve them, run benchmark
sweeps, and compare result groups with ANOVA.

Exit codes: 0 success, 1 usage error, 2 infeasible instance,
3 I/O or schema error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import decoder, fitness, scenario as sc, stats
from .encoding import OPERATOR_SETS
from .engines import ConfigError, default_config, run_ga
from .pathfinding import PathfindingError, build_travel_matrix

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_IO = 3

RAW_COLUMNS = ["label", "seed", "J", "wallclock_s", "generations", "evaluations"]
SUMMARY_COLUMNS = ["label", "J_min", "J_mean", "J_max", "cpu_mean_s", "runs"]


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _load_scenario(path):
    try:
        return sc.load_scenario(path)
    except (OSError, sc.SchemaError, sc.InvariantError) as exc:
        raise CliError(f"cannot load scenario {path}: {exc}", EXIT_IO) from exc


def _config_from_args(args):
    base = default_config(args.engine)
    overrides = {
        "gen_num": args.gens,
        "seed": args.seed,
        "pop_siz": args.pop,
        "operators": args.mutation,
    }
    if args.mutation is None:
        overrides.pop("operators")
    cfg = dataclasses.replace(base, **{k: v for k, v in overrides.items() if v is not None})
    for name in ("pop_sub", "eli_cnt", "best_num", "tor_siz", "p_m", "p_c", "p_a"):
        v = getattr(args, name)
        if v is not None:
            cfg = dataclasses.replace(cfg, **{name: v})
    try:
        cfg.validate()
    except ConfigError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    return cfg


def cmd_generate(args):
    try:
        scen = sc.generate_scenario(
            args.layout, args.single, args.coop, args.robots,
            width=args.width, height=args.height, seed=args.seed,
        )
    except sc.GenerationError as exc:
        raise CliError(str(exc), EXIT_INFEASIBLE) from exc
    sc.save_scenario(scen, args.output)
    print(f"wrote {args.output}: {scen.n_tasks} tasks, "
          f"{scen.n_subtasks} subtasks, {scen.n_robots} robots")
    return EXIT_OK


def cmd_solve(args):
    scen = _load_scenario(args.scenario)
    cfg = _config_from_args(args)
    try:
        matrix = build_travel_matrix(scen)
    except PathfindingError as exc:
        raise CliError(str(exc), EXIT_INFEASIBLE) from exc
    result = run_ga(cfg, scen, matrix)

    try:
        phenotype = decoder.decode(result.best_genotype, scen, matrix)
    except decoder.InfeasibleDecodeError as exc:
        raise CliError(str(exc), EXIT_INFEASIBLE) from exc
    fit = fitness.completion_time(phenotype, matrix, scen)

    schedule = [
        {
            "robot": k + 1,
            "completion": phenotype.completion[k],
            "subtasks": [
                {"id": sid, "arrival": phenotype.arrival[sid],
                 "start": phenotype.start[sid], "wait": phenotype.wait[sid]}
                for sid in seq
            ],
        }
        for k, seq in enumerate(phenotype.sequences)
    ]
    doc = {
        "best_J": result.best_J,
        "schedule": schedule,
        "trace": result.trace,
        "config": dataclasses.asdict(cfg),
        "wallclock_s": result.wallclock_s,
        "evaluations": result.evaluations,
    }
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    if args.dump_schedule:
        _write_schedule_csv(args.dump_schedule, phenotype, scen)
    print(f"best J = {result.best_J:.2f} s "
          f"({result.evaluations} evaluations, {result.wallclock_s:.1f} s)")
    return EXIT_OK


def _write_schedule_csv(path, phenotype, scen):
    effdur = decoder._effective_duration(scen)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["robot", "order", "subtask", "arrival", "start", "wait", "depart"])
        for k, seq in enumerate(phenotype.sequences):
            for i, sid in enumerate(seq):
                w.writerow([k + 1, i, sid,
                            f"{phenotype.arrival[sid]:.6f}",
                            f"{phenotype.start[sid]:.6f}",
                            f"{phenotype.wait[sid]:.6f}",
                            f"{phenotype.start[sid] + effdur[sid]:.6f}"])


def _benchmark_cell(cell):
    cfg, scen, matrix = cell
    res = run_ga(cfg, scen, matrix)
    return (cfg, res)


def cmd_benchmark(args):
    try:
        with open(args.spec) as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read spec {args.spec}: {exc}", EXIT_IO) from exc

    scen_ref = spec.get("scenario")
    if isinstance(scen_ref, str):
        scen = _load_scenario(scen_ref)
    elif isinstance(scen_ref, dict):
        try:
            scen = sc.generate_scenario(
                scen_ref["layout"], scen_ref["single"], scen_ref["coop"],
                scen_ref["robots"], width=scen_ref.get("width", 100),
                height=scen_ref.get("height", 100), seed=scen_ref.get("seed", 0),
            )
        except (KeyError, sc.GenerationError) as exc:
            raise CliError(f"bad scenario spec: {exc}", EXIT_IO) from exc
    else:
        raise CliError("spec needs a 'scenario' path or generator object", EXIT_IO)

    runs = int(spec.get("runs", 1))
    base_seed = int(spec.get("base_seed", 0))
    configs = spec.get("configs")
    if not configs or runs < 1:
        raise CliError("spec needs a non-empty 'configs' list and runs >= 1", EXIT_IO)
    labels = [c.get("label") for c in configs]
    if len(set(labels)) != len(labels) or None in labels:
        raise CliError("config labels must be present and unique", EXIT_IO)

    try:
        matrix = build_travel_matrix(scen)
    except PathfindingError as exc:
        raise CliError(str(exc), EXIT_INFEASIBLE) from exc

    cells = []
    for c in configs:
        fields = {k: v for k, v in c.items() if k != "label"}
        base = default_config(fields.pop("engine", "subpop"))
        try:
            cfg = dataclasses.replace(base, **fields).validate()
        except (TypeError, ConfigError) as exc:
            raise CliError(f"config {c['label']}: {exc}", EXIT_IO) from exc
        for run in range(runs):
            cells.append((c["label"],
                          dataclasses.replace(cfg, seed=base_seed + run)))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_benchmark_cell,
                                    [(cfg, scen, matrix) for _, cfg in cells]))
        results = [(label, res) for (label, _), (_, res) in zip(cells, results)]
    else:
        results = [(label, run_ga(cfg, scen, matrix)) for label, cfg in cells]

    raw_path = f"{args.outdir}/raw.csv"
    summary_path = f"{args.outdir}/summary.csv"
    with open(raw_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(RAW_COLUMNS)
        for label, res in results:
            w.writerow([label, res.config.seed, f"{res.best_J:.6f}",
                        f"{res.wallclock_s:.3f}", res.config.gen_num,
                        res.evaluations])
    with open(summary_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        for label in labels:
            group = [res for lab, res in results if lab == label]
            s = stats.summarize_runs(group)
            w.writerow([label, f"{s.J_min:.2f}", f"{s.J_mean:.2f}",
                        f"{s.J_max:.2f}", f"{s.cpu_mean_s:.2f}", s.runs])
    print(f"wrote {raw_path} ({len(results)} runs) and {summary_path}")
    return EXIT_OK


def read_raw_csv(path):
    """Raw benchmark rows grouped by label: {label: [(seed, J, wall)]}"""
    groups = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            groups.setdefault(row["label"], []).append(
                (int(row["seed"]), float(row["J"]), float(row["wallclock_s"]))
            )
    return groups


def cmd_compare(args):
    try:
        groups = read_raw_csv(args.raw)
    except (OSError, KeyError, ValueError) as exc:
        raise CliError(f"cannot read raw CSV {args.raw}: {exc}", EXIT_IO) from exc
    labels = args.labels or sorted(groups)
    missing = [lab for lab in labels if lab not in groups]
    if missing:
        raise CliError(
            f"unknown label(s) {', '.join(missing)}; "
            f"available: {', '.join(sorted(groups))}", EXIT_USAGE)
    if len(labels) < 2:
        raise CliError("need at least 2 labels to compare", EXIT_USAGE)

    for lab in labels:
        s = stats.summarize([J for _, J, _ in groups[lab]],
                            [wc for _, _, wc in groups[lab]])
        print(f"{lab}: J_min={s.J_min:.2f} J_mean={s.J_mean:.2f} "
              f"J_max={s.J_max:.2f} cpu_mean={s.cpu_mean_s:.1f}s n={s.runs}")
    res = stats.one_way_anova([[J for _, J, _ in groups[lab]] for lab in labels])
    verdict = "significant" if res.significant else "not significant"
    print(f"ANOVA: F={res.F:.4f} p={res.p:.6f} -> {verdict} at 0.05")
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="mrtaga",
                     description="GA solvers for multi-robot inspection "
                                 "task allocation with cooperative tasks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a benchmark scenario")
    p.add_argument("--layout", required=True, choices=["rows", "islands"])
    p.add_argument("--single", type=int, required=True, help="number of single-robot tasks")
    p.add_argument("--coop", type=int, default=0, help="number of cooperative tasks")
    p.add_argument("--robots", type=int, required=True)
    p.add_argument("--width", type=int, default=100)
    p.add_argument("--height", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run one engine on a scenario")
    p.add_argument("scenario")
    p.add_argument("--engine", choices=["subpop", "classical"], default="subpop")
    p.add_argument("--mutation", choices=sorted(OPERATOR_SETS))
    p.add_argument("--gens", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pop", type=int)
    p.add_argument("--pop-sub", dest="pop_sub", type=int)
    p.add_argument("--eli-cnt", dest="eli_cnt", type=int)
    p.add_argument("--best-num", dest="best_num", type=int)
    p.add_argument("--tor-siz", dest="tor_siz", type=int)
    p.add_argument("--pm", dest="p_m", type=float)
    p.add_argument("--pc", dest="p_c", type=float)
    p.add_argument("--pa", dest="p_a", type=float)
    p.add_argument("-o", "--output")
    p.add_argument("--dump-schedule")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("benchmark", help="run a (config x seed) sweep")
    p.add_argument("spec", help="experiment spec JSON")
    p.add_argument("--outdir", default=".")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("compare", help="ANOVA over benchmark result groups")
    p.add_argument("raw", help="raw.csv from the benchmark command")
    p.add_argument("labels", nargs="*")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
