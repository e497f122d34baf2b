import numpy as np
import pytest

from mrtaga.scenario import GridMap, Robot, Scenario, Subtask, Task, validate_scenario


class StubRng:
    """Deterministic stand-in for numpy's Generator: replays queued draws."""

    def __init__(self, integers=(), normals=(), uniforms=()):
        self._ints = list(integers)
        self._normals = list(normals)
        self._uniforms = list(uniforms)

    def integers(self, low, high=None, size=None):
        assert size is None
        return self._ints.pop(0)

    def normal(self, mu, sigma):
        return self._normals.pop(0)

    def random(self):
        return self._uniforms.pop(0)


def empty_grid(width, height, blocked_cells=()):
    blocked = np.zeros((height, width), dtype=bool)
    for x, y in blocked_cells:
        blocked[y][x] = True
    return GridMap(width, height, blocked)


def make_scenario(grid, homes, singles=(), coops=(), duration=2.0, speeds=None):
    """Hand-build a scenario: singles is a list of positions, coops a list
    of position pairs. Ids are assigned in listing order."""
    robots = tuple(
        Robot(k + 1, tuple(h), speeds[k] if speeds else 1.0)
        for k, h in enumerate(homes)
    )
    tasks = []
    sid = 1
    tid = 1
    for pos in singles:
        tasks.append(Task(tid, "single", (Subtask(sid, tid, tuple(pos), duration),)))
        sid += 1
        tid += 1
    for a, b in coops:
        tasks.append(Task(tid, "coop", (Subtask(sid, tid, tuple(a), duration),
                                        Subtask(sid + 1, tid, tuple(b), duration))))
        sid += 2
        tid += 1
    return validate_scenario(Scenario(grid, robots, tuple(tasks)))


@pytest.fixture
def rng():
    return np.random.default_rng(42)
