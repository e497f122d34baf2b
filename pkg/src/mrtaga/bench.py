"""Throughput benchmark: compiled evaluation kernel vs pure-Python decoder.

Usage: python -m mrtaga.bench [--single N] [--coop N] [--n N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from . import core
from .encoding import random_genotype
from .pathfinding import build_travel_matrix
from .scenario import generate_scenario


def run(n_single=80, n_coop=5, n_genotypes=2000, seed=0):
    scen = generate_scenario("rows", n_single, n_coop, 3, seed=seed)
    matrix = build_travel_matrix(scen)
    arrays = core.ScenarioArrays(scen, matrix)
    rng = np.random.default_rng(seed)
    genotypes = [random_genotype(scen.n_tasks, scen.n_robots, rng)
                 for _ in range(n_genotypes)]

    paths = [("pure-python", core.evaluate_py)]
    if core.HAVE_NATIVE:
        paths.insert(0, ("native", core.evaluate_native))
    else:
        print("native kernel not built; benchmarking the fallback only")

    rates = {}
    for name, fn in paths:
        t0 = time.perf_counter()
        values = [fn(g, arrays) for g in genotypes]
        dt = time.perf_counter() - t0
        rates[name] = n_genotypes / dt
        print(f"{name:12s} {n_genotypes} decodes in {dt:6.2f} s "
              f"({rates[name]:9.0f}/s), mean J = {np.mean(values):.2f}")

    if core.HAVE_NATIVE:
        a = [core.evaluate_native(g, arrays) for g in genotypes]
        b = [core.evaluate_py(g, arrays) for g in genotypes]
        assert a == b, "kernel mismatch between native and pure paths"
        print(f"paths agree exactly; native speedup "
              f"{rates['native'] / rates['pure-python']:.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--single", type=int, default=80)
    ap.add_argument("--coop", type=int, default=5)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    run(args.single, args.coop, args.n, args.seed)


if __name__ == "__main__":
    main()
