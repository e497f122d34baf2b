"""Cross-run aggregation and one-way ANOVA.

The F-test p-value is computed from the regularized incomplete beta
function, evaluated with the standard continued-fraction expansion (plain
one-way ANOVA, no Welch correction).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

ALPHA = 0.05

_BETA_TOL = 1e-12
_BETA_MAX_ITER = 500


@dataclass(frozen=True)
class RunStats:
    J_min: float
    J_mean: float
    J_max: float
    cpu_mean_s: float
    runs: int
    J_values: tuple


@dataclass(frozen=True)
class AnovaResult:
    F: float
    p: float
    groups: int
    observations: int
    significant: bool
    degenerate: bool = False


def summarize(J_values, wallclocks=None):
    """Min/mean/max of final J values plus mean wall-clock."""
    vals = [float(v) for v in J_values]
    if not vals:
        raise ValueError("need at least one run")
    walls = [float(w) for w in wallclocks] if wallclocks else [0.0]
    return RunStats(
        J_min=min(vals),
        J_mean=math.fsum(vals) / len(vals),
        J_max=max(vals),
        cpu_mean_s=math.fsum(walls) / len(walls),
        runs=len(vals),
        J_values=tuple(vals),
    )


def summarize_runs(results):
    return summarize([r.best_J for r in results], [r.wallclock_s for r in results])


def _betacf(a, b, x):
    """Continued fraction for the incomplete beta (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_TOL:
            return h
    return h


def betainc(a, b, x):
    """Regularized incomplete beta function I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    # symmetry switch keeps the continued fraction rapidly convergent
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f, df1, df2):
    """Upper tail P(F > f) of the F distribution."""
    if f <= 0.0:
        return 1.0
    x = df2 / (df2 + df1 * f)
    return betainc(df2 / 2.0, df1 / 2.0, x)


def one_way_anova(groups, alpha=ALPHA):
    """Plain one-way ANOVA over ``groups`` (lists of observations)."""
    if len(groups) < 2:
        raise ValueError("need at least 2 groups")
    groups = [[float(v) for v in g] for g in groups]
    for g in groups:
        if len(g) < 2:
            raise ValueError("each group needs at least 2 observations")

    n_total = sum(len(g) for g in groups)
    grand = math.fsum(v for g in groups for v in g) / n_total
    ss_between = math.fsum(
        len(g) * (math.fsum(g) / len(g) - grand) ** 2 for g in groups
    )
    ss_within = math.fsum(
        (v - math.fsum(g) / len(g)) ** 2 for g in groups for v in g
    )
    df1 = len(groups) - 1
    df2 = n_total - len(groups)

    if ss_within <= 0.0:
        if ss_between <= 0.0:  # all observations identical
            return AnovaResult(0.0, 1.0, len(groups), n_total, False)
        # unequal means with zero within-group variance
        return AnovaResult(math.inf, 0.0, len(groups), n_total, True,
                           degenerate=True)

    F = (ss_between / df1) / (ss_within / df2)
    p = f_sf(F, df1, df2)
    return AnovaResult(F, p, len(groups), n_total, p < alpha)
