"""Mission objective: per-robot completion times and their maximum."""

from __future__ import annotations

from dataclasses import dataclass

from .decoder import _effective_duration, _travel


@dataclass(frozen=True)
class FitnessValue:
    J: float                  # mission completion time, lower is better
    completion: tuple         # per robot


def robot_cost(phenotype, k, matrix, scenario):
    """Completion time of robot ``k`` (1-based): home -> subtasks -> home.

    Sums travel legs, busy durations, and waiting times explicitly; equals
    the arrival time back at the home base under the schedule.
    """
    seq = phenotype.sequences[k - 1]
    if not seq:
        return 0.0
    speed = scenario.robots[k - 1].speed
    effdur = _effective_duration(scenario)
    home = scenario.n_subtasks + (k - 1)
    total = _travel(matrix, speed, home, seq[0] - 1)
    for a, b in zip(seq, seq[1:]):
        total += _travel(matrix, speed, a - 1, b - 1)
    total += sum(effdur[sid] + phenotype.wait[sid] for sid in seq)
    total += _travel(matrix, speed, seq[-1] - 1, home)
    return total


def completion_time(phenotype, matrix, scenario):
    completion = tuple(
        robot_cost(phenotype, k, matrix, scenario)
        for k in range(1, scenario.n_robots + 1)
    )
    return FitnessValue(J=max(completion), completion=completion)
