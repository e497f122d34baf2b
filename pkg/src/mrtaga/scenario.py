"""World model: grid maps, robots, tasks, plus instance generation and I/O.

A task is either a single-robot task (one subtask) or a cooperative task
(two subtasks that two different robots must start at the same instant).
Scenario files are JSON; see :func:`save_scenario` for the schema.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .pathfinding import grid_distances

DEFAULT_DURATION = 2.0
DEFAULT_SPEED = 1.0

# cooperative subtasks are placed at most this fraction of the map
# diagonal apart, mimicking paired inspection points
COOP_SEPARATION_FRAC = 0.25


class ScenarioError(ValueError):
    pass


class SchemaError(ScenarioError):
    """Scenario file does not match the expected JSON structure."""


class InvariantError(ScenarioError):
    """Structurally valid scenario violating a domain invariant."""


class GenerationError(ScenarioError):
    """Instance generator could not place the requested layout."""


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    blocked: np.ndarray  # bool, shape (height, width), indexed [y][x]

    def in_bounds(self, cell):
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def is_free(self, cell):
        return self.in_bounds(cell) and not self.blocked[cell[1]][cell[0]]

    def __eq__(self, other):
        if not isinstance(other, GridMap):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and np.array_equal(self.blocked, other.blocked))


@dataclass(frozen=True)
class Robot:
    id: int
    home: tuple[int, int]
    speed: float = DEFAULT_SPEED


@dataclass(frozen=True)
class Subtask:
    id: int
    task_id: int
    pos: tuple[int, int]
    duration: float = DEFAULT_DURATION


@dataclass(frozen=True)
class Task:
    id: int
    kind: str  # "single" | "coop"
    subtasks: tuple[Subtask, ...]


@dataclass(frozen=True)
class Scenario:
    grid: GridMap
    robots: tuple[Robot, ...]
    tasks: tuple[Task, ...]
    subtasks: tuple[Subtask, ...] = field(init=False)

    def __post_init__(self):
        subs = sorted((s for t in self.tasks for s in t.subtasks), key=lambda s: s.id)
        object.__setattr__(self, "subtasks", tuple(subs))

    @property
    def n_tasks(self):
        return len(self.tasks)

    @property
    def n_robots(self):
        return len(self.robots)

    @property
    def n_subtasks(self):
        return len(self.subtasks)


def validate_scenario(scenario):
    """Raise :class:`InvariantError` on the first violated domain invariant."""
    grid = scenario.grid
    if grid.width < 1 or grid.height < 1:
        raise InvariantError("map dimensions must be at least 1x1")
    if grid.blocked.shape != (grid.height, grid.width):
        raise InvariantError("blocked mask shape does not match map dimensions")

    if [r.id for r in scenario.robots] != list(range(1, scenario.n_robots + 1)):
        raise InvariantError("robot ids must be consecutive starting at 1")
    for r in scenario.robots:
        if r.speed <= 0:
            raise InvariantError(f"robot {r.id}: speed must be positive")
        if not grid.is_free(r.home):
            raise InvariantError(f"robot {r.id}: home {r.home} is blocked or out of bounds")

    if [t.id for t in scenario.tasks] != list(range(1, scenario.n_tasks + 1)):
        raise InvariantError("task ids must be consecutive starting at 1")
    n_single = n_coop = 0
    for t in scenario.tasks:
        if t.kind == "single":
            n_single += 1
            if len(t.subtasks) != 1:
                raise InvariantError(f"task {t.id}: single task must have exactly 1 subtask")
        elif t.kind == "coop":
            n_coop += 1
            if len(t.subtasks) != 2 or t.subtasks[0].id == t.subtasks[1].id:
                raise InvariantError(f"task {t.id}: cooperative task must have 2 distinct subtasks")
        else:
            raise InvariantError(f"task {t.id}: unknown kind {t.kind!r}")
        for s in t.subtasks:
            if s.task_id != t.id:
                raise InvariantError(f"subtask {s.id}: parent task id mismatch")
            if s.duration < 0:
                raise InvariantError(f"subtask {s.id}: negative inspection duration")
            if not grid.is_free(s.pos):
                raise InvariantError(f"subtask {s.id}: position {s.pos} is blocked or out of bounds")

    ids = [s.id for s in scenario.subtasks]
    if ids != list(range(1, len(ids) + 1)):
        raise InvariantError("subtask ids must be consecutive starting at 1")
    if len(ids) != n_single + 2 * n_coop:
        raise InvariantError("subtask count must equal singles + 2*cooperatives")
    return scenario


# ---------------------------------------------------------------------------
# instance generation


def _rows_map(width, height):
    """Horizontal obstacle strips with corridors and open ends."""
    blocked = np.zeros((height, width), dtype=bool)
    pitch = max(6, height // 8)
    margin = max(2, width // 20)
    for y0 in range(pitch, height - 2, pitch):
        blocked[y0 : y0 + 2, margin : width - margin] = True
    return blocked


def _islands_map(width, height):
    """Rectangular obstacle clusters arranged on a regular grid."""
    blocked = np.zeros((height, width), dtype=bool)
    iw = max(3, width // 12)
    ih = max(3, height // 12)
    px = iw + max(3, width // 20)
    py = ih + max(3, height // 20)
    for y0 in range(3, height - ih - 2, py):
        for x0 in range(3, width - iw - 2, px):
            blocked[y0 : y0 + ih, x0 : x0 + iw] = True
    return blocked


def _candidate_cells(blocked, layout):
    """Cells eligible to host inspection positions for a layout family."""
    height, width = blocked.shape
    if layout == "rows":
        return [
            (x, y)
            for y in range(height)
            for x in range(width)
            if not blocked[y][x]
        ]
    # islands: unblocked cells orthogonally adjacent to an obstacle
    cands = []
    for y in range(height):
        for x in range(width):
            if blocked[y][x]:
                continue
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nx, ny = x + dx, y + dy
                if 0 <= nx < width and 0 <= ny < height and blocked[ny][nx]:
                    cands.append((x, y))
                    break
    return cands


def _border_cells(blocked):
    """Border cells in clockwise perimeter order starting at (0, 0)."""
    height, width = blocked.shape
    cells = [(x, 0) for x in range(width)]
    cells += [(width - 1, y) for y in range(1, height)]
    cells += [(x, height - 1) for x in range(width - 2, -1, -1)]
    cells += [(0, y) for y in range(height - 2, 0, -1)]
    return [c for c in cells if not blocked[c[1]][c[0]]]


def generate_scenario(layout, n_single, n_coop, n_robots, width=100, height=100, seed=0,
                      duration=DEFAULT_DURATION):
    """Generate a benchmark instance in one of the two layout families.

    ``rows`` places positions in corridors between horizontal obstacle
    strips; ``islands`` places them on the perimeters of rectangular
    obstacle clusters. Deterministic for a fixed argument tuple.
    """
    if n_single < 0 or n_coop < 0:
        raise GenerationError("task counts must be non-negative")
    if n_robots < 1:
        raise GenerationError("need at least one robot")
    if n_coop > 0 and n_robots < 2:
        raise GenerationError("cooperative tasks require at least 2 robots")
    if layout not in ("rows", "islands"):
        raise GenerationError(f"unknown layout {layout!r} (expected 'rows' or 'islands')")

    rng = np.random.default_rng(seed)
    blocked = _rows_map(width, height) if layout == "rows" else _islands_map(width, height)
    grid = GridMap(width, height, blocked)

    border = _border_cells(blocked)
    if len(border) < n_robots:
        raise GenerationError("map border too small for the requested robot count")
    step = len(border) / n_robots
    homes = [border[int(k * step)] for k in range(n_robots)]
    if len(set(homes)) != n_robots:
        raise GenerationError("could not place distinct home bases")

    candidates = [c for c in _candidate_cells(blocked, layout) if c not in set(homes)]
    # keep only cells reachable from the first home base
    reach = grid_distances(grid, [homes[0]])[0]
    candidates = [c for c in candidates if np.isfinite(reach[c[1] * width + c[0]])]
    for h in homes:
        if not np.isfinite(reach[h[1] * width + h[0]]):
            raise GenerationError("home bases are not mutually reachable")

    n_positions = n_single + 2 * n_coop
    if len(candidates) < n_positions:
        raise GenerationError(
            f"map supports only {len(candidates)} positions, need {n_positions}"
        )

    max_sep = COOP_SEPARATION_FRAC * math.hypot(width, height)
    used = set()

    def draw(pool):
        for _ in range(1000):
            c = pool[int(rng.integers(len(pool)))]
            if c not in used:
                used.add(c)
                return c
        raise GenerationError("placement failed after bounded retries")

    tasks = []
    sub_id = 1
    for tid in range(1, n_single + 1):
        pos = draw(candidates)
        tasks.append(Task(tid, "single", (Subtask(sub_id, tid, pos, duration),)))
        sub_id += 1
    for tid in range(n_single + 1, n_single + n_coop + 1):
        for _ in range(200):
            a = draw(candidates)
            near = [c for c in candidates
                    if c not in used and math.hypot(c[0] - a[0], c[1] - a[1]) <= max_sep]
            if near:
                b = draw(near)
                break
            used.discard(a)
        else:
            raise GenerationError("could not place a cooperative pair within the separation bound")
        tasks.append(
            Task(tid, "coop", (Subtask(sub_id, tid, a, duration),
                               Subtask(sub_id + 1, tid, b, duration)))
        )
        sub_id += 2

    robots = tuple(Robot(k + 1, homes[k]) for k in range(n_robots))
    return validate_scenario(Scenario(grid, robots, tuple(tasks)))


# ---------------------------------------------------------------------------
# serialization


def scenario_to_dict(scenario):
    return {
        "map": {
            "width": scenario.grid.width,
            "height": scenario.grid.height,
            "blocked": [[int(x), int(y)]
                        for y in range(scenario.grid.height)
                        for x in range(scenario.grid.width)
                        if scenario.grid.blocked[y][x]],
        },
        "robots": [
            {"id": r.id, "home": [r.home[0], r.home[1]], "speed": r.speed}
            for r in scenario.robots
        ],
        "tasks": [
            {
                "id": t.id,
                "kind": t.kind,
                "subtasks": [
                    {"id": s.id, "pos": [s.pos[0], s.pos[1]], "duration": s.duration}
                    for s in t.subtasks
                ],
            }
            for t in scenario.tasks
        ],
    }


def _require(obj, key, typ, path):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{path}: missing field {key!r}")
    val = obj[key]
    if not isinstance(val, typ):
        raise SchemaError(f"{path}.{key}: expected {typ.__name__}, got {type(val).__name__}")
    return val


def _cell(val, path):
    if (not isinstance(val, list) or len(val) != 2
            or not all(isinstance(v, int) for v in val)):
        raise SchemaError(f"{path}: expected a [x, y] integer pair")
    return (val[0], val[1])


def scenario_from_dict(doc):
    m = _require(doc, "map", dict, "$")
    width = _require(m, "width", int, "$.map")
    height = _require(m, "height", int, "$.map")
    if width < 1 or height < 1:
        raise SchemaError("$.map: width and height must be at least 1")
    blocked = np.zeros((height, width), dtype=bool)
    for i, cell in enumerate(_require(m, "blocked", list, "$.map")):
        x, y = _cell(cell, f"$.map.blocked[{i}]")
        if not (0 <= x < width and 0 <= y < height):
            raise SchemaError(f"$.map.blocked[{i}]: cell ({x}, {y}) out of bounds")
        blocked[y][x] = True

    robots = []
    for i, r in enumerate(_require(doc, "robots", list, "$")):
        path = f"$.robots[{i}]"
        robots.append(Robot(
            id=_require(r, "id", int, path),
            home=_cell(_require(r, "home", list, path), f"{path}.home"),
            speed=float(_require(r, "speed", (int, float), path)),
        ))

    tasks = []
    for i, t in enumerate(_require(doc, "tasks", list, "$")):
        path = f"$.tasks[{i}]"
        tid = _require(t, "id", int, path)
        kind = _require(t, "kind", str, path)
        if kind not in ("single", "coop"):
            raise SchemaError(f"{path}.kind: expected 'single' or 'coop', got {kind!r}")
        subs = []
        for j, s in enumerate(_require(t, "subtasks", list, path)):
            spath = f"{path}.subtasks[{j}]"
            subs.append(Subtask(
                id=_require(s, "id", int, spath),
                task_id=tid,
                pos=_cell(_require(s, "pos", list, spath), f"{spath}.pos"),
                duration=float(_require(s, "duration", (int, float), spath)),
            ))
        tasks.append(Task(tid, kind, tuple(subs)))

    return validate_scenario(Scenario(GridMap(width, height, blocked),
                                      tuple(robots), tuple(tasks)))


def save_scenario(scenario, path):
    """Write the scenario as canonical JSON (stable key order, stable bytes)."""
    with open(path, "w") as fh:
        json.dump(scenario_to_dict(scenario), fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_scenario(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)
