"""Grid path planning: single-floor A* and elevator-aware multi-floor routing.

Movement model: 8-connected, straight steps cost 1, diagonal steps cost
sqrt(2). A diagonal step is forbidden only when BOTH of its adjacent
orthogonal cells are occupied (no squeezing through a closed corner).
Equal-cost ties break toward the smaller (row, col) cell so planned paths
are reproducible byte for byte.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .errors import Unreachable, ValidationError
from .sitemap import Cell, FloorGrid, GoalPose, SiteMap

SQRT2 = math.sqrt(2.0)

# (drow, dcol) in (row, col)-sorted order; expansion order is the tie-break
_MOVES = (
    (-1, -1), (-1, 0), (-1, 1),
    (0, -1), (0, 1),
    (1, -1), (1, 0), (1, 1),
)


@dataclass(frozen=True)
class FloorPlan:
    waypoints: tuple[Cell, ...]
    cost: float


@dataclass(frozen=True)
class PathSegment:
    floor_id: str
    waypoints: tuple[Cell, ...]


@dataclass(frozen=True)
class Transition:
    """Elevator ride joining segment ``from_index`` to segment ``to_index``."""

    shaft_id: str
    from_index: int
    to_index: int


@dataclass(frozen=True)
class Path:
    segments: tuple[PathSegment, ...]
    transitions: tuple[Transition, ...]
    total_cost: float

    def goal_cell(self) -> tuple[str, Cell]:
        last = self.segments[-1]
        return last.floor_id, last.waypoints[-1]

    def as_dict(self) -> dict:
        return {
            "segments": [
                {"floor_id": s.floor_id, "waypoints": [list(w) for w in s.waypoints]}
                for s in self.segments
            ],
            "transitions": [
                {"shaft_id": t.shaft_id, "from_index": t.from_index, "to_index": t.to_index}
                for t in self.transitions
            ],
            "total_cost": self.total_cost,
        }


def _check_endpoint(grid: FloorGrid, cell: Cell, label: str) -> None:
    if not grid.in_bounds(cell):
        raise ValidationError(f"{label} cell {list(cell)} outside floor {grid.floor_id!r}")
    if not grid.is_free(cell):
        raise ValidationError(f"{label} cell {list(cell)} on floor {grid.floor_id!r} is occupied")


def _step_cost(a: Cell, b: Cell) -> float:
    return SQRT2 if a[0] != b[0] and a[1] != b[1] else 1.0


def _legal_step(grid: FloorGrid, a: Cell, b: Cell) -> bool:
    if not grid.is_free(b):
        return False
    dc, dr = b[0] - a[0], b[1] - a[1]
    if dc != 0 and dr != 0:
        if not grid.is_free((a[0] + dc, a[1])) and not grid.is_free((a[0], a[1] + dr)):
            return False
    return True


def octile(a: Cell, b: Cell) -> float:
    dx = abs(a[0] - b[0])
    dy = abs(a[1] - b[1])
    lo, hi = (dx, dy) if dx < dy else (dy, dx)
    return (hi - lo) + SQRT2 * lo


def plan_floor(grid: FloorGrid, start: Cell, goal: Cell) -> FloorPlan:
    """Cost-optimal path on one floor, or raise Unreachable.

    A* with the octile heuristic; optimality is checked against a plain
    uniform-cost oracle in the test suite.
    """
    _check_endpoint(grid, start, "start")
    _check_endpoint(grid, goal, "goal")
    if start == goal:
        return FloorPlan(waypoints=(start,), cost=0.0)

    g_score: dict[Cell, float] = {start: 0.0}
    parent: dict[Cell, Cell] = {}
    # heap keyed (f, row, col): equal-f ties pop the smaller (row, col) cell
    heap: list[tuple[float, int, int]] = [(octile(start, goal), start[1], start[0])]
    done: set[Cell] = set()

    while heap:
        _, row, col = heapq.heappop(heap)
        cell = (col, row)
        if cell in done:
            continue
        if cell == goal:
            waypoints = [cell]
            while cell != start:
                cell = parent[cell]
                waypoints.append(cell)
            waypoints.reverse()
            return FloorPlan(waypoints=tuple(waypoints), cost=g_score[goal])
        done.add(cell)
        g = g_score[cell]
        for dr, dc in _MOVES:
            nxt = (col + dc, row + dr)
            if nxt in done or not _legal_step(grid, cell, nxt):
                continue
            tentative = g + _step_cost(cell, nxt)
            if tentative < g_score.get(nxt, math.inf):
                g_score[nxt] = tentative
                parent[nxt] = cell
                heapq.heappush(heap, (tentative + octile(nxt, goal), nxt[1], nxt[0]))

    raise Unreachable(f"no path {list(start)} -> {list(goal)} on floor {grid.floor_id!r}")


# ---------------------------------------------------------------------------
# multi-floor routing

# portal node keys: ("start",), ("goal",), ("stop", shaft_id, floor_id)
_Portal = tuple


def plan_path(site: SiteMap, start: tuple[str, Cell], goal: GoalPose) -> Path:
    """Cost-optimal route from ``start`` to ``goal``, riding elevators as needed.

    Same-floor goals plan directly on that floor; cross-floor goals search a
    small graph whose nodes are the start, the goal and every shaft stop,
    with in-floor legs weighted by plan_floor and any stop-to-stop ride
    within one shaft weighted by the map's elevator_cost.
    """
    start_floor, start_cell = start
    grid = site.floor(start_floor)
    _check_endpoint(grid, start_cell, "start")
    goal_grid = site.floor(goal.floor_id)
    _check_endpoint(goal_grid, goal.cell, "goal")

    if goal.floor_id == start_floor:
        plan = plan_floor(grid, start_cell, goal.cell)
        return Path(
            segments=(PathSegment(floor_id=start_floor, waypoints=plan.waypoints),),
            transitions=(),
            total_cost=plan.cost,
        )

    positions: dict[_Portal, tuple[str, Cell]] = {
        ("start",): (start_floor, start_cell),
        ("goal",): (goal.floor_id, goal.cell),
    }
    for shaft in site.shafts:
        for stop in shaft.stops:
            positions[("stop", shaft.shaft_id, stop.floor_id)] = (stop.floor_id, stop.cell)

    by_floor: dict[str, list[_Portal]] = {}
    for key, (floor_id, _) in positions.items():
        by_floor.setdefault(floor_id, []).append(key)
    for portals in by_floor.values():
        portals.sort()

    leg_cache: dict[tuple[_Portal, _Portal], FloorPlan | None] = {}

    def leg(a: _Portal, b: _Portal) -> FloorPlan | None:
        cached = leg_cache.get((a, b))
        if (a, b) not in leg_cache:
            floor_id, cell_a = positions[a]
            _, cell_b = positions[b]
            try:
                cached = plan_floor(site.floor(floor_id), cell_a, cell_b)
            except Unreachable:
                cached = None
            leg_cache[(a, b)] = cached
        return cached

    def edges(node: _Portal):
        floor_id, _ = positions[node]
        for other in by_floor[floor_id]:
            if other == node:
                continue
            plan = leg(node, other)
            if plan is not None:
                yield other, plan.cost
        if node[0] == "stop":
            _, shaft_id, here = node
            for other in sorted(positions):
                if other[0] == "stop" and other[1] == shaft_id and other[2] != here:
                    yield other, site.elevator_cost

    dist: dict[_Portal, float] = {("start",): 0.0}
    prev: dict[_Portal, _Portal] = {}
    heap: list[tuple[float, _Portal]] = [(0.0, ("start",))]
    settled: set[_Portal] = set()
    while heap:
        d, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled.add(node)
        if node == ("goal",):
            break
        for other, weight in edges(node):
            nd = d + weight
            if nd < dist.get(other, math.inf):
                dist[other] = nd
                prev[other] = node
                heapq.heappush(heap, (nd, other))

    if ("goal",) not in settled:
        raise Unreachable(
            f"no elevator route from floor {start_floor!r} to floor {goal.floor_id!r}"
        )

    route: list[_Portal] = [("goal",)]
    while route[-1] != ("start",):
        route.append(prev[route[-1]])
    route.reverse()

    segments: list[PathSegment] = []
    transitions: list[Transition] = []
    seg_floor = start_floor
    seg_cells: list[Cell] = [start_cell]
    for a, b in zip(route, route[1:]):
        floor_a, _ = positions[a]
        floor_b, cell_b = positions[b]
        if floor_a == floor_b:
            seg_cells.extend(leg(a, b).waypoints[1:])
        else:
            segments.append(PathSegment(floor_id=seg_floor, waypoints=tuple(seg_cells)))
            transitions.append(
                Transition(shaft_id=a[1], from_index=len(segments) - 1, to_index=len(segments))
            )
            seg_floor = floor_b
            seg_cells = [cell_b]
    segments.append(PathSegment(floor_id=seg_floor, waypoints=tuple(seg_cells)))

    return Path(
        segments=tuple(segments),
        transitions=tuple(transitions),
        total_cost=dist[("goal",)],
    )


def flatten_path(path: Path) -> tuple[tuple[str, Cell], ...]:
    """Per-tick waypoint sequence: (floor_id, cell) pairs, start included."""
    flat: list[tuple[str, Cell]] = []
    for seg in path.segments:
        for cell in seg.waypoints:
            flat.append((seg.floor_id, cell))
    return tuple(flat)


def validate_path(site: SiteMap, path: Path) -> None:
    """Raise ValidationError unless ``path`` satisfies every path invariant."""
    if not path.segments:
        raise ValidationError("path has no segments")
    cost = 0.0
    for i, seg in enumerate(path.segments):
        grid = site.floor(seg.floor_id)
        if not seg.waypoints:
            raise ValidationError(f"segment {i} has no waypoints")
        for cell in seg.waypoints:
            if not grid.is_free(cell):
                raise ValidationError(
                    f"segment {i}: cell {list(cell)} not free on floor {seg.floor_id!r}"
                )
        for a, b in zip(seg.waypoints, seg.waypoints[1:]):
            dc, dr = abs(b[0] - a[0]), abs(b[1] - a[1])
            if max(dc, dr) != 1:
                raise ValidationError(f"segment {i}: step {list(a)} -> {list(b)} not 8-adjacent")
            if not _legal_step(grid, a, b):
                raise ValidationError(f"segment {i}: step {list(a)} -> {list(b)} cuts a corner")
            cost += _step_cost(a, b)

    if len(path.transitions) != len(path.segments) - 1:
        raise ValidationError(
            f"expected {len(path.segments) - 1} transitions, got {len(path.transitions)}"
        )
    shafts = {s.shaft_id: s for s in site.shafts}
    for i, tr in enumerate(path.transitions):
        if tr.from_index != i or tr.to_index != i + 1:
            raise ValidationError(f"transition {i} does not link segments {i} and {i + 1}")
        shaft = shafts.get(tr.shaft_id)
        if shaft is None:
            raise ValidationError(f"transition {i}: unknown shaft {tr.shaft_id!r}")
        seg_a, seg_b = path.segments[i], path.segments[i + 1]
        stop_a = shaft.stop_on(seg_a.floor_id)
        stop_b = shaft.stop_on(seg_b.floor_id)
        if stop_a is None or stop_a.cell != seg_a.waypoints[-1]:
            raise ValidationError(
                f"transition {i}: segment {i} does not end at a {tr.shaft_id!r} stop"
            )
        if stop_b is None or stop_b.cell != seg_b.waypoints[0]:
            raise ValidationError(
                f"transition {i}: segment {i + 1} does not start at a {tr.shaft_id!r} stop"
            )
        cost += site.elevator_cost

    if not math.isclose(cost, path.total_cost, rel_tol=0.0, abs_tol=1e-9):
        raise ValidationError(f"total_cost {path.total_cost} != recomputed {cost}")
