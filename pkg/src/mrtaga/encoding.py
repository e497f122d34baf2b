"""Genotype representation and variation operators.

A genotype is a permutation of task ids (the chromosome) plus ``n_robots-1``
sorted split indices (the gene-apportion) that partition the chromosome
into per-robot segments. Mutation operators act on the chromosome only;
the apportion is resampled around a cumulative average of the best
individuals seen so far.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: stddev of the apportion sampler, as a fraction of the task count
APPORTION_SIGMA_FRAC = 0.03

MUTATIONS = ("swap", "insertion", "inversion", "displacement")

OPERATOR_SETS = {
    "swap": ("swap",),
    "insertion": ("insertion",),
    "inversion": ("inversion",),
    "displacement": ("displacement",),
    "swap+inversion": ("swap", "inversion"),
    "insertion+inversion": ("insertion", "inversion"),
    "displacement+inversion": ("displacement", "inversion"),
    "all-four": MUTATIONS,
}


@dataclass(frozen=True)
class Genotype:
    chromosome: np.ndarray  # permutation of 1..n_tasks, dtype int32
    apportion: np.ndarray   # sorted split indices in [1, n_tasks], len n_robots-1

    def copy(self):
        return Genotype(self.chromosome.copy(), self.apportion.copy())


def random_genotype(n_tasks, n_robots, rng):
    if n_tasks < 1 or n_robots < 1:
        raise ValueError("need at least one task and one robot")
    chrom = rng.permutation(np.arange(1, n_tasks + 1, dtype=np.int32))
    app = np.sort(rng.integers(1, n_tasks + 1, size=n_robots - 1).astype(np.int32))
    return Genotype(chrom, app)


def mutate_swap(chromosome, rng):
    """Exchange two uniformly drawn positions (a no-op if they coincide)."""
    out = chromosome.copy()
    i = int(rng.integers(len(out)))
    j = int(rng.integers(len(out)))
    out[i], out[j] = out[j], out[i]
    return out


def mutate_insertion(chromosome, rng):
    """Move one uniformly drawn gene to a uniformly drawn gap."""
    out = list(chromosome)
    i = int(rng.integers(len(out)))
    gene = out.pop(i)
    g = int(rng.integers(len(out) + 1))
    out.insert(g, gene)
    return np.asarray(out, dtype=chromosome.dtype)


def _segment(n, rng):
    """Uniform ordered index pair (a, b) with a <= b."""
    i = int(rng.integers(n))
    j = int(rng.integers(n))
    return (i, j) if i <= j else (j, i)


def mutate_inversion(chromosome, rng):
    """Reverse a uniformly drawn contiguous segment."""
    a, b = _segment(len(chromosome), rng)
    out = chromosome.copy()
    out[a : b + 1] = out[a : b + 1][::-1]
    return out


def mutate_displacement(chromosome, rng):
    """Cut a uniformly drawn segment and reinsert it at a uniform gap."""
    a, b = _segment(len(chromosome), rng)
    rest = list(chromosome[:a]) + list(chromosome[b + 1 :])
    g = int(rng.integers(len(rest) + 1))
    seg = list(chromosome[a : b + 1])
    return np.asarray(rest[:g] + seg + rest[g:], dtype=chromosome.dtype)


MUTATION_FUNCS = {
    "swap": mutate_swap,
    "insertion": mutate_insertion,
    "inversion": mutate_inversion,
    "displacement": mutate_displacement,
}


class ApportionSampler:
    """Samples apportions from a normal centred on the running average of
    generation-best apportions, with sigma fixed at 3% of the task count."""

    def __init__(self, n_tasks, n_robots, sigma=None):
        self.n_tasks = n_tasks
        self.mu = np.full(n_robots - 1, (n_tasks + 1) / 2.0)
        self.sigma = APPORTION_SIGMA_FRAC * n_tasks if sigma is None else sigma
        self.generations = 0

    def update(self, best_apportion):
        """Fold one generation-best apportion into the cumulative average."""
        best = np.asarray(best_apportion, dtype=float)
        if best.shape != self.mu.shape:
            raise ValueError("apportion length mismatch")
        g = self.generations
        self.mu = (self.mu * g + best) / (g + 1) if g else best.copy()
        self.generations = g + 1

    def sample(self, rng, max_redraws=1000):
        """Draw a sorted apportion; out-of-range values are redrawn
        (truncated normal), clamped only after ``max_redraws`` rejections."""
        out = np.empty(len(self.mu), dtype=np.int32)
        for j, mu_j in enumerate(self.mu):
            for _ in range(max_redraws):
                v = int(round(rng.normal(mu_j, self.sigma)))
                if 1 <= v <= self.n_tasks:
                    break
            else:
                v = min(max(v, 1), self.n_tasks)
            out[j] = v
        out.sort()
        return out
