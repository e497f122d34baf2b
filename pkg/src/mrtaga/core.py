"""Fast genotype evaluation: packed scenario arrays and kernel selection.

The GA engines score hundreds of thousands of genotypes per run, so the
decode+fitness path is also implemented as a compiled extension
(:mod:`mrtaga._native`). At import time the compiled kernel is used when
present, with the pure-Python decoder as fallback. Both paths compute the
identical schedule; ``python -m mrtaga.bench`` compares their throughput.
"""

from __future__ import annotations

import math

import numpy as np

from . import decoder

try:
    from . import _native
    HAVE_NATIVE = True
except ImportError:
    _native = None
    HAVE_NATIVE = False


class ScenarioArrays:
    """Scenario + travel matrix flattened into contiguous arrays."""

    def __init__(self, scenario, matrix):
        self.scenario = scenario
        self.matrix = np.ascontiguousarray(matrix, dtype=np.float64)
        nt = scenario.n_tasks
        nsub = scenario.n_subtasks
        self.n_tasks = nt
        self.n_robots = scenario.n_robots
        self.n_subtasks = nsub
        self.kind = np.zeros(nt, dtype=np.int8)
        self.sub1 = np.full(nt, -1, dtype=np.int32)
        self.sub2 = np.full(nt, -1, dtype=np.int32)
        for t in scenario.tasks:
            i = t.id - 1
            self.sub1[i] = t.subtasks[0].id - 1
            if t.kind == "coop":
                self.kind[i] = 1
                self.sub2[i] = t.subtasks[1].id - 1
        self.n_coop = int(self.kind.sum())
        effdur = decoder._effective_duration(scenario)
        self.effdur = np.array([effdur[s.id] for s in scenario.subtasks])
        self.speed = np.array([r.speed for r in scenario.robots])


def evaluate_py(genotype, arrays):
    """Reference path: full decode, then the objective. inf if infeasible."""
    try:
        ph = decoder.decode(genotype, arrays.scenario, arrays.matrix)
    except decoder.InfeasibleDecodeError:
        return math.inf
    return max(ph.completion)


def evaluate_native(genotype, arrays):
    j = _native.evaluate(
        np.ascontiguousarray(genotype.chromosome, dtype=np.int32),
        np.ascontiguousarray(genotype.apportion, dtype=np.int32),
        arrays.kind, arrays.sub1, arrays.sub2,
        arrays.effdur, arrays.speed, arrays.matrix,
        arrays.n_subtasks,
    )
    return math.inf if j < 0 else j


evaluate = evaluate_native if HAVE_NATIVE else evaluate_py
