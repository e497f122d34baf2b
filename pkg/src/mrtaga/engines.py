"""The two competing optimizers.

``subpop``: each generation the population is re-partitioned into random
subpopulations; within each, the best individuals pass through unchanged
(elitism) and the best few are mutated to refill the group. No crossover.

``classical``: whole-population elitism, tournament selection, PMX
crossover and low-probability mutation.

Both engines evaluate the full population every generation, so with equal
``pop_siz`` and ``gen_num`` they spend the same evaluation budget.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import core
from .encoding import (MUTATION_FUNCS, OPERATOR_SETS, ApportionSampler,
                       Genotype, random_genotype)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GAConfig:
    engine: str = "subpop"            # "subpop" | "classical"
    pop_siz: int = 200
    pop_sub: int = 10
    eli_cnt: int = 2
    best_num: int = 1
    tor_siz: int = 2
    p_m: float = 1.0
    p_c: float = 0.9
    p_a: float = 0.2
    gen_num: int = 2000
    operators: str = "inversion"      # key into OPERATOR_SETS
    seed: int = 0

    def operator_names(self):
        try:
            return OPERATOR_SETS[self.operators]
        except KeyError:
            raise ConfigError(
                f"unknown operator set {self.operators!r}; "
                f"valid: {', '.join(sorted(OPERATOR_SETS))}"
            ) from None

    def validate(self):
        ops = self.operator_names()
        for name in ("p_m", "p_c", "p_a"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        if self.engine not in ("subpop", "classical"):
            raise ConfigError(f"unknown engine {self.engine!r}")
        if self.pop_siz < 1 or self.gen_num < 0:
            raise ConfigError("pop_siz must be positive and gen_num non-negative")
        if self.engine == "subpop":
            if self.pop_siz % self.pop_sub:
                raise ConfigError("pop_siz must be divisible by pop_sub")
            if self.eli_cnt >= self.pop_sub:
                raise ConfigError("eli_cnt must be smaller than pop_sub")
            if (self.pop_sub - self.eli_cnt) % self.best_num:
                raise ConfigError("(pop_sub - eli_cnt) must be divisible by best_num")
            quota = (self.pop_sub - self.eli_cnt) // self.best_num
            if quota % len(ops):
                raise ConfigError(
                    "offspring quota per parent must divide evenly across "
                    f"the {len(ops)} operators"
                )
        else:
            if self.eli_cnt >= self.pop_siz:
                raise ConfigError("eli_cnt must be smaller than pop_siz")
            if self.tor_siz < 1:
                raise ConfigError("tor_siz must be at least 1")
        return self


@dataclass
class RunResult:
    best_genotype: Genotype
    best_J: float
    trace: list = field(repr=False)   # global-best J per generation
    wallclock_s: float = 0.0
    evaluations: int = 0
    config: GAConfig | None = None


def default_config(engine):
    """Parameter defaults used throughout the experiments."""
    if engine == "subpop":
        return GAConfig(engine="subpop", p_m=1.0, p_a=0.2, operators="inversion")
    return GAConfig(engine="classical", tor_siz=2, p_c=0.9, p_m=0.01, p_a=0.2,
                    operators="inversion")


def pmx_crossover(parent_a, parent_b, rng):
    """Partially mapped crossover with one uniformly drawn cut-point pair.

    The segment between the cuts is exchanged and out-of-segment
    duplicates are repaired through the segment's gene mapping.
    """
    n = len(parent_a)
    c1 = int(rng.integers(n + 1))
    c2 = int(rng.integers(n + 1))
    while c2 == c1:
        c2 = int(rng.integers(n + 1))
    if c1 > c2:
        c1, c2 = c2, c1

    def child_of(p, q):
        child = p.copy()
        child[c1:c2] = q[c1:c2]
        mapping = {int(q[i]): int(p[i]) for i in range(c1, c2)}
        segment = set(int(v) for v in q[c1:c2])
        for i in list(range(c1)) + list(range(c2, n)):
            v = int(p[i])
            while v in segment:
                v = mapping[v]
            child[i] = v
        return child

    return child_of(parent_a, parent_b), child_of(parent_b, parent_a)


def tournament_select(J, tor_siz, rng):
    """Index of the winner among ``tor_siz`` uniform draws (with
    replacement); ties keep the earliest drawn."""
    best = int(rng.integers(len(J)))
    for _ in range(tor_siz - 1):
        i = int(rng.integers(len(J)))
        if J[i] < J[best]:
            best = i
    return best


def partition_subpopulations(pop_siz, pop_sub, rng):
    """Uniformly random partition into pop_siz/pop_sub groups of indices."""
    perm = rng.permutation(pop_siz)
    return [perm[i : i + pop_sub] for i in range(0, pop_siz, pop_sub)]


def _mutate_child(parent, ops_name, sampler, p_m, p_a, rng):
    if rng.random() < p_m:
        chrom = MUTATION_FUNCS[ops_name](parent.chromosome, rng)
    else:
        chrom = parent.chromosome.copy()
    if len(parent.apportion) and rng.random() < p_a:
        app = sampler.sample(rng)
    else:
        app = parent.apportion.copy()
    return Genotype(chrom, app)


def _ranked(indices, J):
    return sorted(indices, key=lambda i: (J[i], i))


def run_ga(config, scenario, matrix):
    """Run one engine to completion; dispatches on ``config.engine``."""
    config.validate()
    arrays = core.ScenarioArrays(scenario, matrix)
    nt, nr = scenario.n_tasks, scenario.n_robots
    rng = np.random.default_rng(config.seed)
    ops = config.operator_names()

    pop = [random_genotype(nt, nr, rng) for _ in range(config.pop_siz)]
    sampler = ApportionSampler(nt, nr)
    best = None
    best_J = math.inf
    trace = []
    evaluations = 0

    t0 = time.perf_counter()
    for gen in range(config.gen_num):
        J = [core.evaluate(g, arrays) for g in pop]
        evaluations += len(pop)
        i = min(range(len(J)), key=lambda i: (J[i], i))
        if J[i] < best_J:
            best_J = J[i]
            best = pop[i].copy()
        trace.append(best_J)
        if len(best.apportion):
            sampler.update(best.apportion)
        if gen == config.gen_num - 1:
            break
        if config.engine == "subpop":
            pop = _next_subpop(pop, J, config, ops, sampler, rng)
        else:
            pop = _next_classical(pop, J, config, ops, sampler, rng)
    wall = time.perf_counter() - t0

    if best is None:  # gen_num == 0: report the best of the initial population
        J = [core.evaluate(g, arrays) for g in pop]
        i = min(range(len(J)), key=lambda i: (J[i], i))
        best, best_J = pop[i].copy(), J[i]

    return RunResult(best_genotype=best, best_J=best_J, trace=trace,
                     wallclock_s=wall, evaluations=evaluations, config=config)


def _next_subpop(pop, J, config, ops, sampler, rng):
    quota = (config.pop_sub - config.eli_cnt) // config.best_num
    per_op = quota // len(ops)
    newpop = []
    for group in partition_subpopulations(config.pop_siz, config.pop_sub, rng):
        order = _ranked(group, J)
        for i in order[: config.eli_cnt]:
            newpop.append(pop[i].copy())
        for i in order[: config.best_num]:
            parent = pop[i]
            for op in ops:
                for _ in range(per_op):
                    newpop.append(_mutate_child(parent, op, sampler,
                                                config.p_m, config.p_a, rng))
    return newpop


def _next_classical(pop, J, config, ops, sampler, rng):
    op = ops[0]
    order = _ranked(range(len(pop)), J)
    newpop = [pop[i].copy() for i in order[: config.eli_cnt]]
    n_parents = config.pop_siz - config.eli_cnt
    parents = [pop[tournament_select(J, config.tor_siz, rng)]
               for _ in range(n_parents)]

    children = []
    for a, b in zip(parents[0::2], parents[1::2]):
        if rng.random() < config.p_c:
            ca, cb = pmx_crossover(a.chromosome, b.chromosome, rng)
        else:
            ca, cb = a.chromosome.copy(), b.chromosome.copy()
        children.append((ca, a))
        children.append((cb, b))
    if n_parents % 2:
        children.append((parents[-1].chromosome.copy(), parents[-1]))

    for chrom, parent in children:
        if rng.random() < config.p_m:
            chrom = MUTATION_FUNCS[op](chrom, rng)
        if len(parent.apportion) and rng.random() < config.p_a:
            app = sampler.sample(rng)
        else:
            app = parent.apportion.copy()
        newpop.append(Genotype(chrom, app))
    return newpop


def run_subpop_ga(config, scenario, matrix):
    if config.engine != "subpop":
        config = replace(config, engine="subpop")
    return run_ga(config, scenario, matrix)


def run_classical_ga(config, scenario, matrix):
    if config.engine != "classical":
        config = replace(config, engine="classical")
    return run_ga(config, scenario, matrix)
