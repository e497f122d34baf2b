"""Grid pathfinding: A* travel times and the all-pairs travel matrix.

The world is an 8-connected grid. Orthogonal steps cost 1 cell, diagonal
steps cost sqrt(2). A diagonal step is forbidden when both orthogonal
neighbours it passes between are blocked (no corner cutting). Travel time
is path length divided by robot speed.
"""

from __future__ import annotations

import heapq
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

SQRT2 = math.sqrt(2.0)

#: Sentinel for "no path exists".
UNREACHABLE = math.inf


class PathfindingError(ValueError):
    pass


def _check_endpoint(grid, cell, what):
    x, y = cell
    if not (0 <= x < grid.width and 0 <= y < grid.height):
        raise PathfindingError(f"{what} {cell} is out of bounds")
    if grid.blocked[y][x]:
        raise PathfindingError(f"{what} {cell} is a blocked cell")


def neighbors(grid, x, y):
    """Yield (nx, ny, step_cost) for legal moves out of (x, y)."""
    blocked = grid.blocked
    w, h = grid.width, grid.height
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            nx, ny = x + dx, y + dy
            if not (0 <= nx < w and 0 <= ny < h) or blocked[ny][nx]:
                continue
            if dx != 0 and dy != 0:
                # no corner cutting through two blocked orthogonal cells
                if blocked[y][x + dx] or blocked[y + dy][x]:
                    continue
                yield nx, ny, SQRT2
            else:
                yield nx, ny, 1.0


def octile(a, b):
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    return (dx + dy) + (SQRT2 - 2.0) * min(dx, dy)


def astar_travel_time(grid, start, goal, speed=1.0):
    """Shortest travel time from ``start`` to ``goal`` at ``speed`` cells/s.

    Returns :data:`UNREACHABLE` when no path exists. Raises
    :class:`PathfindingError` on blocked or out-of-bounds endpoints.
    """
    _check_endpoint(grid, start, "start")
    _check_endpoint(grid, goal, "goal")
    if speed <= 0:
        raise PathfindingError(f"speed must be positive, got {speed}")
    if start == goal:
        return 0.0

    start = tuple(start)
    goal = tuple(goal)
    g = {start: 0.0}
    open_heap = [(octile(start, goal), start)]
    closed = set()
    while open_heap:
        f, cell = heapq.heappop(open_heap)
        if cell == goal:
            return g[cell] / speed
        if cell in closed:
            continue
        closed.add(cell)
        gc = g[cell]
        for nx, ny, step in neighbors(grid, cell[0], cell[1]):
            ncell = (nx, ny)
            ng = gc + step
            if ng < g.get(ncell, math.inf):
                g[ncell] = ng
                heapq.heappush(open_heap, (ng + octile(ncell, goal), ncell))
    return UNREACHABLE


def _grid_graph(grid):
    """Sparse move graph over unblocked cells, node id = y*width + x."""
    w, h = grid.width, grid.height
    rows, cols, data = [], [], []
    for y in range(h):
        for x in range(w):
            if grid.blocked[y][x]:
                continue
            u = y * w + x
            for nx, ny, step in neighbors(grid, x, y):
                rows.append(u)
                cols.append(ny * w + nx)
                data.append(step)
    n = w * h
    return csr_matrix((data, (rows, cols)), shape=(n, n))


def grid_distances(grid, sources):
    """Shortest path lengths from each source cell to every cell.

    Returns an array of shape (len(sources), height*width) with inf for
    unreachable cells. Uses Dijkstra on the same move graph as A*, so the
    results agree with :func:`astar_travel_time` exactly.
    """
    graph = _grid_graph(grid)
    idx = [y * grid.width + x for x, y in sources]
    return _csgraph_dijkstra(graph, directed=False, indices=idx)


def build_travel_matrix(scenario):
    """All-pairs path lengths between subtask positions and home bases.

    Index order: subtasks by id (0-based), then robots by id. Entries are
    path lengths in cells; divide by a robot's speed for travel time.
    Raises :class:`PathfindingError` naming the first required pair that is
    unreachable (every home base must reach every subtask).
    """
    positions = [s.pos for s in scenario.subtasks] + [r.home for r in scenario.robots]
    for i, p in enumerate(positions):
        _check_endpoint(scenario.grid, p, f"position #{i}")
    dist = grid_distances(scenario.grid, positions)
    w = scenario.grid.width
    m = dist[:, [y * w + x for x, y in positions]]
    np.fill_diagonal(m, 0.0)
    n_sub = len(scenario.subtasks)
    for k, robot in enumerate(scenario.robots):
        for i, sub in enumerate(scenario.subtasks):
            if not np.isfinite(m[n_sub + k, i]):
                raise PathfindingError(
                    f"subtask {sub.id} at {sub.pos} is unreachable from "
                    f"home of robot {robot.id} at {robot.home}"
                )
    # symmetrize exactly (undirected graph; guards float asymmetry)
    m = np.minimum(m, m.T)
    return m
