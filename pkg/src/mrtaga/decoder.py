"""Genotype -> schedule decoding.

Splitting the chromosome gives each robot an ordered task segment. Single
tasks become their lone subtask directly. Each cooperative task is first
pinned to the robot whose segment holds it (the carrier takes whichever of
the two subtasks is closer along its route), then the partner subtask is
inserted into another robot's sequence at the admissible slot that
minimises the pair's waiting time. Pairs are resolved in the order the
carriers reach them, and slots that would reorder an already committed
pair are never offered, so every decoded schedule is executable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class InfeasibleDecodeError(RuntimeError):
    """No admissible insertion slot exists for a cooperative task."""

    def __init__(self, task_id, genotype):
        self.task_id = task_id
        self.genotype = genotype
        super().__init__(f"no admissible slot for cooperative task {task_id}")


@dataclass(frozen=True)
class Phenotype:
    """Executable schedule: per-robot subtask order plus timing."""

    sequences: tuple          # per robot: tuple of subtask ids
    arrival: dict             # subtask id -> arrival time at its position
    start: dict               # subtask id -> inspection start time
    wait: dict                # subtask id -> start - arrival
    completion: tuple         # per robot: time back at home base

    def robot_of(self, sub_id):
        for k, seq in enumerate(self.sequences):
            if sub_id in seq:
                return k + 1
        return None


def split_chromosome(genotype, n_tasks):
    """Per-robot task-id segments defined by the apportion split points."""
    bounds = [0] + [int(a) for a in genotype.apportion] + [n_tasks]
    chrom = [int(t) for t in genotype.chromosome]
    return [chrom[bounds[k] : bounds[k + 1]] for k in range(len(bounds) - 1)]


def _effective_duration(scenario):
    """Per-subtask busy time. Both members of a cooperative pair occupy
    their robots for the longer of the two durations."""
    dur = {}
    for t in scenario.tasks:
        if t.kind == "coop":
            d = max(s.duration for s in t.subtasks)
            for s in t.subtasks:
                dur[s.id] = d
        else:
            dur[t.subtasks[0].id] = t.subtasks[0].duration
    return dur


def _travel(matrix, speed, i, j):
    return float(matrix[i, j]) / speed


def choose_carrier_subtask(task, prev_index, robot, matrix):
    """Of a cooperative task's two subtasks, the one closer to the robot's
    preceding position (matrix ``prev_index``); ties go to the lower id."""
    s1, s2 = task.subtasks
    d1 = _travel(matrix, robot.speed, prev_index, s1.id - 1)
    d2 = _travel(matrix, robot.speed, prev_index, s2.id - 1)
    if d2 < d1:
        return s2.id
    return s1.id


def decode(genotype, scenario, matrix):
    """Decode a genotype into a full :class:`Phenotype`.

    Raises :class:`InfeasibleDecodeError` when a cooperative task has no
    admissible insertion slot (e.g. a single-robot fleet).
    """
    nt = scenario.n_tasks
    nr = scenario.n_robots
    nsub = scenario.n_subtasks
    tasks = {t.id: t for t in scenario.tasks}
    effdur = _effective_duration(scenario)
    speeds = [r.speed for r in scenario.robots]
    home = [nsub + k for k in range(nr)]

    # --- split + S1: carrier choice for cooperative tasks
    segments = split_chromosome(genotype, nt)
    seqs = [[] for _ in range(nr)]
    partner = {}           # carrier sub id -> partner sub id
    pending = {}           # task id -> (robot index, carrier sub id)
    for k in range(nr):
        prev = home[k]
        for tid in segments[k]:
            task = tasks[tid]
            if task.kind == "single":
                sid = task.subtasks[0].id
            else:
                sid = choose_carrier_subtask(task, prev, scenario.robots[k], matrix)
                other = task.subtasks[0].id if sid == task.subtasks[1].id else task.subtasks[1].id
                partner[sid] = other
                pending[tid] = (k, sid)
            seqs[k].append(sid)
            prev = sid - 1

    # --- forward time propagation under the committed waits so far
    committed_start = {}
    arrival = {}
    start = {}
    depart = {}

    def forward(k):
        t = 0.0
        prev = home[k]
        for sid in seqs[k]:
            a = t + _travel(matrix, speeds[k], prev, sid - 1)
            arrival[sid] = a
            start[sid] = committed_start.get(sid, a)
            t = start[sid] + effdur[sid]
            depart[sid] = t
            prev = sid - 1
        if seqs[k]:
            t += _travel(matrix, speeds[k], prev, home[k])
        return t

    for k in range(nr):
        forward(k)

    def active_slot_range(r, current_tid):
        """Admissible insertion slot indices on robot r's sequence."""
        lo = 0
        hi = len(seqs[r])
        for pos, sid in enumerate(seqs[r]):
            if sid in committed_start:
                lo = max(lo, pos + 1)
            elif sid in partner and tasks[scenario.subtasks[sid - 1].task_id].id != current_tid:
                # still-pending cooperative carrier: only slots before it
                hi = min(hi, pos)
        return lo, hi

    # --- S2: resolve cooperative tasks in carrier-arrival order
    while pending:
        tid = min(pending, key=lambda t: (arrival[pending[t][1]], t))
        k_car, c = pending[tid]
        p = partner[c]
        best = None  # (wait, robot, slot, partner_arrival)
        for r in range(nr):
            if r == k_car:
                continue
            lo, hi = active_slot_range(r, tid)
            for slot in range(lo, hi + 1):
                if slot == 0:
                    base, prev = 0.0, home[r]
                else:
                    prev_sid = seqs[r][slot - 1]
                    base, prev = depart[prev_sid], prev_sid - 1
                arr_p = base + _travel(matrix, speeds[r], prev, p - 1)
                wait = abs(arr_p - arrival[c])
                if best is None or wait < best[0]:
                    best = (wait, r, slot, arr_p)
        if best is None:
            raise InfeasibleDecodeError(tid, genotype)
        _, r_best, slot, arr_p = best
        seqs[r_best].insert(slot, p)
        pair_start = max(arr_p, arrival[c])
        committed_start[c] = pair_start
        committed_start[p] = pair_start
        del pending[tid]
        for k in (k_car, r_best):
            forward(k)

    completion = tuple(forward(k) for k in range(nr))
    wait = {sid: start[sid] - arrival[sid] for sid in start}
    return Phenotype(
        sequences=tuple(tuple(s) for s in seqs),
        arrival=arrival,
        start=start,
        wait=wait,
        completion=completion,
    )


def active_slots(seqs, committed, pending_carriers, carrier_robot):
    """Admissible (robot, slot) pairs for inserting a partner subtask.

    ``committed`` holds already scheduled cooperative subtask ids,
    ``pending_carriers`` the carrier ids of still-unresolved pairs. Exposed
    separately so the slot rule can be exercised directly in tests.
    """
    out = []
    for r, seq in enumerate(seqs):
        if r == carrier_robot:
            continue
        lo, hi = 0, len(seq)
        for pos, sid in enumerate(seq):
            if sid in committed:
                lo = max(lo, pos + 1)
            elif sid in pending_carriers:
                hi = min(hi, pos)
        out.extend((r, s) for s in range(lo, hi + 1))
    return out


def validate_phenotype(phenotype, scenario, tol=1e-9):
    """Check every schedule invariant; return None if ok, else a message.

    Checks the subtask partition, the distinct-robots rule and common
    start time for cooperative pairs, wait accounting, and per-robot
    time monotonicity.
    """
    all_ids = sorted(s.id for s in scenario.subtasks)
    scheduled = [sid for seq in phenotype.sequences for sid in seq]
    if sorted(scheduled) != all_ids:
        return "partition violation: scheduled subtasks != subtask set"
    if len(phenotype.sequences) != scenario.n_robots:
        return "partition violation: wrong robot count"

    robot_of = {}
    for k, seq in enumerate(phenotype.sequences):
        for sid in seq:
            robot_of[sid] = k + 1

    for t in scenario.tasks:
        if t.kind != "coop":
            continue
        a, b = (s.id for s in t.subtasks)
        if robot_of[a] == robot_of[b]:
            return f"distinct-robots violation: task {t.id} subtasks {a},{b} on one robot"
        if abs(phenotype.start[a] - phenotype.start[b]) > tol:
            return f"common-start violation: task {t.id} start times differ"

    coop_ids = {s.id for t in scenario.tasks if t.kind == "coop" for s in t.subtasks}
    for sid in scheduled:
        w = phenotype.wait[sid]
        if w < -tol:
            return f"negative waiting time at subtask {sid}"
        if abs(phenotype.start[sid] - phenotype.arrival[sid] - w) > tol:
            return f"wait accounting violation at subtask {sid}"
        if sid not in coop_ids and abs(w) > tol:
            return f"single-robot subtask {sid} has nonzero wait"

    for k, seq in enumerate(phenotype.sequences):
        last = 0.0
        for sid in seq:
            if phenotype.arrival[sid] < last - tol:
                return f"monotonicity violation: time goes backwards on robot {k + 1}"
            if phenotype.start[sid] < phenotype.arrival[sid] - tol:
                return f"start before arrival at subtask {sid}"
            last = phenotype.start[sid]
    return None
