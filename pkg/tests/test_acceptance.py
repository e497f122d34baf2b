"""End-to-end acceptance suite.

Each test prints one ``ACCEPTANCE n: PASS`` line (run with ``-s`` to see
them live). The comparative criteria run 20 seeded engine runs per arm at
2000 generations and share their run caches through module fixtures, so
the whole file takes tens of minutes.
"""

import dataclasses
import itertools
import time

import numpy as np
import pytest
import scipy.stats

from mrtaga import core, decoder
from mrtaga.encoding import (MUTATION_FUNCS, Genotype, mutate_displacement,
                             mutate_insertion, mutate_inversion, random_genotype)
from mrtaga.engines import default_config, run_ga
from mrtaga.pathfinding import (astar_travel_time, build_travel_matrix,
                                grid_distances)
from mrtaga.scenario import GridMap, generate_scenario
from mrtaga.stats import betainc, f_sf, one_way_anova

from test_decoder import oracle_check_decode
from test_pathfinding import dijkstra_oracle

N_SEEDS = 20
GEN_NUM = 2000

# fixed benchmark instances (large no-coop, mixed coop, clustered coop)
LARGE_NOCOOP = ("rows", 90, 0, 3, 0)
MIXED_COOP = ("rows", 80, 5, 3, 0)
CLUSTERED_COOP = ("islands", 90, 5, 3, 0)
# no-coop instance sized so the swap/inversion ranking flips between
# generation 100 and 2000 within the 2000-generation budget
NOCOOP = ("rows", 110, 0, 2, 1)


def _instance(spec):
    layout, single, coop, robots, seed = spec
    scen = generate_scenario(layout, single, coop, robots, seed=seed)
    return scen, build_travel_matrix(scen)


def _runs(scen, matrix, engine, operators, gen_num=GEN_NUM, n=N_SEEDS):
    out = []
    for seed in range(n):
        cfg = dataclasses.replace(default_config(engine), operators=operators,
                                  gen_num=gen_num, seed=seed)
        out.append(run_ga(cfg, scen, matrix))
    return out


def _report(n, ok, detail=""):
    print(f"\nACCEPTANCE {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"criterion {n}: {detail}"


@pytest.fixture(scope="module")
def inst_large():
    return _instance(LARGE_NOCOOP)


@pytest.fixture(scope="module")
def inst_mixed():
    return _instance(MIXED_COOP)


@pytest.fixture(scope="module")
def runs_large(inst_large):
    scen, m = inst_large
    return {"subpop": _runs(scen, m, "subpop", "inversion"),
            "classical": _runs(scen, m, "classical", "inversion")}


@pytest.fixture(scope="module")
def runs_mixed(inst_mixed):
    scen, m = inst_mixed
    return {"subpop": _runs(scen, m, "subpop", "inversion"),
            "classical": _runs(scen, m, "classical", "inversion")}


@pytest.fixture(scope="module")
def runs_coop_ops(inst_mixed, runs_mixed):
    scen, m = inst_mixed
    return {"GA2": _runs(scen, m, "subpop", "insertion"),
            "GA3": runs_mixed["subpop"],
            "GA5": _runs(scen, m, "subpop", "swap+inversion")}


@pytest.fixture(scope="module")
def runs_nocoop_ops():
    scen, m = _instance(NOCOOP)
    return {"GA1": _runs(scen, m, "subpop", "swap"),
            "GA2": _runs(scen, m, "subpop", "insertion"),
            "GA3": _runs(scen, m, "subpop", "inversion")}


def _means(runs):
    return float(np.mean([r.best_J for r in runs]))


def test_c01_decoder_soundness_sweep(inst_mixed):
    t0 = time.perf_counter()
    failures = 0
    for spec in (MIXED_COOP, CLUSTERED_COOP):
        scen, m = _instance(spec) if spec != MIXED_COOP else inst_mixed
        rng = np.random.default_rng(0)
        for _ in range(5000):
            g = random_genotype(scen.n_tasks, scen.n_robots, rng)
            ph = decoder.decode(g, scen, m)
            if decoder.validate_phenotype(ph, scen) is not None:
                failures += 1
    elapsed = time.perf_counter() - t0
    _report(1, failures == 0 and elapsed <= 120,
            f"{failures} violations in 10^4 decodes, {elapsed:.0f}s")


def test_c02_small_instance_optimality():
    t0 = time.perf_counter()
    worst = 20
    for inst in range(8, 18):
        n_tasks = 5 + inst % 2
        scen = generate_scenario("rows", n_tasks, 0, 2,
                                 width=40, height=40, seed=inst)
        m = build_travel_matrix(scen)
        arrays = core.ScenarioArrays(scen, m)
        optimum = min(
            core.evaluate(Genotype(np.array(p, dtype=np.int32),
                                   np.array([a], dtype=np.int32)), arrays)
            for p in itertools.permutations(range(1, n_tasks + 1))
            for a in range(1, n_tasks + 1)
        )
        hits = 0
        for seed in range(20):
            cfg = dataclasses.replace(default_config("subpop"),
                                      gen_num=200, seed=seed)
            res = run_ga(cfg, scen, m)
            hits += abs(res.best_J - optimum) <= 1e-9
        worst = min(worst, hits)
    elapsed = time.perf_counter() - t0
    _report(2, worst >= 19 and elapsed <= 300,
            f"worst instance {worst}/20 optimal, {elapsed:.0f}s")


def test_c03_cooperative_slot_oracle():
    t0 = time.perf_counter()
    checked = 0
    for inst in range(20):
        n_coop = 1 + inst % 2
        n_single = 4 - 2 * n_coop + inst % 3
        scen = generate_scenario("rows", n_single, n_coop, 2,
                                 width=40, height=40, seed=inst)
        assert scen.n_subtasks <= 8
        m = build_travel_matrix(scen)
        rng = np.random.default_rng(inst)
        for _ in range(10):
            g = random_genotype(scen.n_tasks, scen.n_robots, rng)
            oracle_check_decode(scen, m, g)
            checked += 1
    elapsed = time.perf_counter() - t0
    _report(3, elapsed <= 60, f"{checked} decodes slot-optimal, {elapsed:.0f}s")


def test_c04_subpop_vs_classical(runs_large, runs_mixed):
    details = []
    ok = True
    for name, runs in (("no-coop", runs_large), ("coop", runs_mixed)):
        sub, cls = runs["subpop"], runs["classical"]
        p = one_way_anova([[r.best_J for r in sub],
                           [r.best_J for r in cls]]).p
        wall_sub = float(np.mean([r.wallclock_s for r in sub]))
        wall_cls = float(np.mean([r.wallclock_s for r in cls]))
        good = _means(sub) < _means(cls) and p < 0.05 and wall_sub <= wall_cls
        ok = ok and good
        details.append(f"{name}: J {_means(sub):.0f} vs {_means(cls):.0f} "
                       f"p={p:.2e} cpu {wall_sub:.1f}s vs {wall_cls:.1f}s")
    _report(4, ok, "; ".join(details))


def test_c05_operator_directionality(runs_nocoop_ops, runs_coop_ops):
    nc = {k: _means(v) for k, v in runs_nocoop_ops.items()}
    p_nc = one_way_anova([[r.best_J for r in runs_nocoop_ops["GA3"]],
                          [r.best_J for r in runs_nocoop_ops["GA2"]]]).p
    co = {k: _means(v) for k, v in runs_coop_ops.items()}
    p_co = one_way_anova([[r.best_J for r in runs_coop_ops["GA5"]],
                          [r.best_J for r in runs_coop_ops["GA2"]]]).p
    ok = (nc["GA3"] < nc["GA1"] and nc["GA3"] < nc["GA2"] and p_nc < 0.05
          and co["GA5"] <= co["GA3"] and p_co < 0.05)
    _report(5, ok,
            f"no-coop GA1/GA2/GA3 {nc['GA1']:.0f}/{nc['GA2']:.0f}/"
            f"{nc['GA3']:.0f} p32={p_nc:.2e}; "
            f"coop GA2/GA3/GA5 {co['GA2']:.0f}/{co['GA3']:.0f}/"
            f"{co['GA5']:.0f} p52={p_co:.2e}")


def test_c06_swap_inversion_crossover(runs_nocoop_ops):
    g1, g3 = runs_nocoop_ops["GA1"], runs_nocoop_ops["GA3"]
    early_wins = sum(a.trace[99] <= b.trace[99] for a, b in zip(g1, g3))
    p = one_way_anova([[r.best_J for r in g1], [r.best_J for r in g3]]).p
    late_ok = _means(g3) < _means(g1) and p < 0.05
    _report(6, early_wins >= 15 and late_ok,
            f"gen100 swap wins {early_wins}/20; gen2000 "
            f"{_means(g1):.0f} vs {_means(g3):.0f} p={p:.2e}")


def test_c07_mutation_properties():
    rng = np.random.default_rng(0)
    failures = 0
    for name, op in MUTATION_FUNCS.items():
        for _ in range(10_000):
            n = int(rng.integers(2, 12))
            chrom = rng.permutation(np.arange(1, n + 1, dtype=np.int32))
            if sorted(op(chrom, rng)) != list(range(1, n + 1)):
                failures += 1

    for _ in range(2000):  # inverting the same segment twice is the identity
        n = int(rng.integers(2, 12))
        chrom = rng.permutation(np.arange(1, n + 1, dtype=np.int32))
        i, j = sorted(rng.choice(n, size=2, replace=False))
        queue = [i, j, i, j]
        stub = type("S", (), {"integers": lambda self, *a, **k: queue.pop(0)})()
        twice = mutate_inversion(mutate_inversion(chrom, stub), stub)
        failures += list(twice) != list(chrom)

    # insertion == length-1 displacement, exhaustively on length 4
    base = np.array([1, 2, 3, 4], dtype=np.int32)
    for i in range(4):
        for g in range(4):
            q_ins, q_dis = [i, g], [i, i, g]
            s_ins = type("S", (), {"integers": lambda self, *a, **k: q_ins.pop(0)})()
            s_dis = type("S", (), {"integers": lambda self, *a, **k: q_dis.pop(0)})()
            a = mutate_insertion(base, s_ins)
            b = mutate_displacement(base, s_dis)
            failures += list(a) != list(b)
    _report(7, failures == 0, f"{failures} failures")


def test_c08_astar_vs_dijkstra():
    rng = np.random.default_rng(1)
    bad = 0

    maps = []
    for seed in range(3):
        r = np.random.default_rng(seed)
        blocked = r.random((12, 12)) < 0.25
        blocked[0, 0] = False
        maps.append(GridMap(12, 12, blocked))
    for g in maps:
        oracle = dijkstra_oracle(g, (0, 0))
        for y in range(g.height):
            for x in range(g.width):
                if g.blocked[y][x]:
                    continue
                got = astar_travel_time(g, (0, 0), (x, y), 1.0)
                ref = oracle.get((x, y), np.inf)
                bad += not (got == ref or abs(got - ref) <= 1e-12)

    blocked = np.random.default_rng(7).random((100, 100)) < 0.2
    blocked[0, 0] = False
    big = GridMap(100, 100, blocked)
    dist = grid_distances(big, [(0, 0)])[0]
    for _ in range(50):
        x, y = int(rng.integers(100)), int(rng.integers(100))
        while big.blocked[y][x]:
            x, y = int(rng.integers(100)), int(rng.integers(100))
        got = astar_travel_time(big, (0, 0), (x, y), 1.0)
        ref = dist[y * 100 + x]
        bad += not (got == ref or abs(got - ref) <= 1e-12)
    _report(8, bad == 0, f"{bad} mismatches")


def test_c09_anova_oracle():
    fixture = [[1.0, 2.0, 3.0, 4.0], [5.0, 6.0, 7.0, 8.0]]
    res = one_way_anova(fixture)
    f_ref, p_ref = scipy.stats.f_oneway(*fixture)
    ok = (abs(res.F - 19.2) / 19.2 <= 1e-6
          and abs(res.F - f_ref) / f_ref <= 1e-6
          and abs(res.p - p_ref) / p_ref <= 1e-6)

    rng = np.random.default_rng(0)
    groups = [list(rng.normal(loc, 2.0, size=15)) for loc in (0.0, 0.5, 1.0)]
    base = one_way_anova(groups)
    shifted = one_way_anova([[x + 7.0 for x in g] for g in groups])
    scaled = one_way_anova([[3.0 * x for x in g] for g in groups])
    ok = ok and abs(shifted.F - base.F) <= 1e-9 * base.F
    ok = ok and abs(scaled.F - base.F) <= 1e-9 * base.F
    ps = [f_sf(f, 2, 42) for f in np.linspace(0.0, 30.0, 40)]
    ok = ok and all(a >= b for a, b in zip(ps, ps[1:]))
    for _ in range(100):
        a, b = rng.uniform(0.2, 30.0, size=2)
        x = float(rng.uniform(0.0, 1.0))
        ok = ok and abs(betainc(a, b, x) + betainc(b, a, 1.0 - x) - 1.0) <= 1e-12
    _report(9, ok, f"F={res.F:.6f} p={res.p:.6e}")


def test_c10_budget_and_monotonicity(runs_large, runs_mixed, runs_nocoop_ops,
                                     runs_coop_ops):
    bad = 0
    total = 0
    for group in (runs_large, runs_mixed, runs_nocoop_ops, runs_coop_ops):
        for runs in group.values():
            for r in runs:
                total += 1
                if r.evaluations != r.config.pop_siz * r.config.gen_num:
                    bad += 1
                elif any(a > b for a, b in zip(r.trace[1:], r.trace)):
                    bad += 1
    _report(10, bad == 0, f"{total} runs checked")
