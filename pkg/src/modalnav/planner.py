"""Energy-aware A* over the 2.5D grid, emitting mode-tagged 3D waypoints.

Each grid cell is either ground-drivable (costmap value below the energy
ratio threshold) or aerial-only. Stepping into a ground cell costs the step
length plus the cell cost; stepping into an aerial cell additionally pays
the cell cost once per cell of climbed/descended elevation plus a flat
aerial surcharge. Every step increment is at least the Euclidean step
length, so straight-line distance is an admissible heuristic and the
returned path cost is optimal over the step-cost graph.
"""

import heapq
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .costmap import ModalCostmap
from .gridmap import (ElevationGrid, GridMismatchError, UnobservedCellError,
                      footprint_max_field, grid_to_world, max_elevation_footprint,
                      world_to_grid)

from enum import Enum


class LocomotionMode(Enum):
    GROUND = "G"
    AERIAL = "A"


class NoPathError(RuntimeError):
    """The search exhausted the open set without reaching the goal region."""


@dataclass(frozen=True)
class ModalWaypoint:
    """A 3D waypoint tagged with the locomotion mode used to reach it."""

    x: float
    y: float
    z: float
    flag: LocomotionMode

    @property
    def xy(self) -> Tuple[float, float]:
        return (self.x, self.y)

    @property
    def xyz(self) -> Tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class PlannerParams:
    """Search configuration.

    clearance: vertical margin above the footprint max for aerial waypoints.
    aerial_extra_cost: flat surcharge added to every aerial step.
    goal_threshold: capture radius around the goal; defaults to one cell
        diagonal. aerial_threshold: costmap value from which a cell counts
        as aerial-only; defaults to the costmap's energy ratio.
    """

    clearance: float = 0.5
    aerial_extra_cost: float = 0.0
    goal_threshold: Optional[float] = None
    aerial_threshold: Optional[float] = None
    connectivity: int = 8

    def __post_init__(self):
        if self.clearance < 0.0:
            raise ValueError("clearance must be >= 0")
        if self.goal_threshold is not None and self.goal_threshold < 0.0:
            raise ValueError("goal_threshold must be >= 0")
        if self.connectivity not in (4, 8):
            raise ValueError(f"connectivity must be 4 or 8, got {self.connectivity}")


@dataclass
class ModalPath:
    """Planned waypoint sequence plus the accumulated search cost."""

    waypoints: List[ModalWaypoint]
    total_g: float

    def __len__(self) -> int:
        return len(self.waypoints)

    @property
    def flags(self) -> List[LocomotionMode]:
        return [w.flag for w in self.waypoints]


def heuristic(a: Tuple[float, float], b: Tuple[float, float]) -> float:
    """Euclidean distance between two planar points."""
    return math.hypot(b[0] - a[0], b[1] - a[1])


def _resolve_aerial_threshold(costmap: ModalCostmap, params: PlannerParams) -> float:
    if params.aerial_threshold is not None:
        return params.aerial_threshold
    return costmap.aerial_energy_ratio


def step_cost(current: Tuple[int, int], neighbor: Tuple[int, int],
              costmap: ModalCostmap, elev: ElevationGrid,
              params: PlannerParams = PlannerParams()) -> Tuple[float, LocomotionMode, float]:
    """Cost increment, locomotion flag, and waypoint altitude for one grid move.

    Aerial neighbors (cell cost at or above the aerial threshold) pay

        step_length + cost * delta_e + aerial_extra_cost + cost

    with delta_e the elevation change between the two cells in whole cells
    of resolution, and fly at the footprint max elevation plus clearance.
    Ground neighbors pay ``step_length + cost`` and sit on the terrain.
    """
    le = _resolve_aerial_threshold(costmap, params)
    e_c = elev.height_at[current]
    e_n = elev.height_at[neighbor]
    if math.isnan(e_n):
        raise UnobservedCellError(f"neighbor cell {neighbor} has no elevation data")
    if math.isnan(e_c):
        raise UnobservedCellError(f"current cell {current} has no elevation data")
    c_n = float(costmap.cost_at[neighbor])
    dr = abs(neighbor[0] - current[0])
    dc = abs(neighbor[1] - current[1])
    if max(dr, dc) != 1:
        raise ValueError(f"cells {current} and {neighbor} are not adjacent")
    res = costmap.meta.resolution
    step_len = res * math.sqrt(2.0) if dr and dc else res
    if c_n >= le:
        delta_e = round(abs(e_c - e_n) / res)
        z = max_elevation_footprint(elev, neighbor) + params.clearance
        return (step_len + c_n * delta_e + params.aerial_extra_cost + c_n,
                LocomotionMode.AERIAL, z)
    return (step_len + c_n, LocomotionMode.GROUND, float(e_n))


_OFFSETS_4 = ((-1, 0), (0, -1), (0, 1), (1, 0))
_OFFSETS_8 = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))


def neighbors(cell: Tuple[int, int], costmap: ModalCostmap, elev: ElevationGrid,
              params: PlannerParams = PlannerParams()) -> Iterator[Tuple[int, int]]:
    """Cells reachable from `cell` in one step.

    A neighbor must be in bounds, have observed elevation, and carry a
    finite cost. A diagonal move between two ground cells also requires both
    orthogonal corner cells to be ground-passable: the rasterized segment
    between the cell centers touches those corners, so allowing the cut
    would let pruned paths clip aerial cells.
    """
    rows, cols = costmap.meta.shape
    le = _resolve_aerial_threshold(costmap, params)
    cost = costmap.cost_at
    hgt = elev.height_at
    r, c = cell
    cur_ground = cost[r, c] < le
    offsets = _OFFSETS_8 if params.connectivity == 8 else _OFFSETS_4
    for dr, dc in offsets:
        nr, nc = r + dr, c + dc
        if not (0 <= nr < rows and 0 <= nc < cols):
            continue
        if math.isnan(hgt[nr, nc]):
            continue
        cn = cost[nr, nc]
        if cn == math.inf:
            continue
        if dr != 0 and dc != 0 and cur_ground and cn < le:
            if cost[r, nc] >= le or cost[nr, c] >= le:
                continue
        if cn >= le and math.isnan(_footprint_or_nan(elev, (nr, nc))):
            continue
        yield (nr, nc)


def _footprint_or_nan(elev: ElevationGrid, idx: Tuple[int, int]) -> float:
    try:
        return max_elevation_footprint(elev, idx)
    except UnobservedCellError:
        return math.nan


def plan(costmap: ModalCostmap, elev: ElevationGrid,
         start: Tuple[float, float], goal: Tuple[float, float],
         params: PlannerParams = PlannerParams()) -> ModalPath:
    """Best-first search from start to goal over the modal costmap.

    Expands cells by f = g + max(0, h - goal_threshold); the max keeps the
    heuristic admissible for *every* cell inside the capture disc around the
    goal, so the first such cell popped carries the cheapest reachable g and
    the returned cost is minimal over the whole step-cost graph. Ties break
    on lower heuristic, then row-major cell order, which makes the result
    deterministic.

    Raises OutOfBoundsError for start/goal outside the map, ValueError when
    the start cell is not ground-classified, and NoPathError when the open
    set runs dry.
    """
    meta = costmap.meta
    if meta != elev.meta:
        raise GridMismatchError("costmap and elevation grids disagree on geometry")

    start_cell = world_to_grid(start, meta)
    world_to_grid(goal, meta)  # bounds check only

    res = meta.resolution
    rows, cols = meta.shape
    le = _resolve_aerial_threshold(costmap, params)
    threshold = params.goal_threshold
    if threshold is None:
        threshold = res * math.sqrt(2.0)
    cl = params.clearance
    cle_a = params.aerial_extra_cost

    # Flat Python lists index faster than numpy scalars in the hot loop.
    cost = costmap.cost_at.ravel().tolist()
    hgt = elev.height_at.ravel().tolist()
    maxe = footprint_max_field(elev).ravel().tolist()

    sidx = start_cell[0] * cols + start_cell[1]
    if math.isnan(hgt[sidx]):
        raise UnobservedCellError("start cell has no elevation data")
    if cost[sidx] >= le:
        raise ValueError("start cell is not ground-classified")

    gx, gy = goal
    half_h = meta.height / 2.0
    half_w = meta.width / 2.0
    ox, oy = meta.origin
    # Cell-center-to-goal distance, term for term the same expression as
    # grid_to_world: the default threshold is exactly one cell diagonal, so
    # any reassociation here could flip the boundary comparison.

    def goal_distance(r: int, c: int) -> float:
        return math.hypot((r + 0.5) * res - half_h - ox - gx,
                          (c + 0.5) * res - half_w - oy - gy)

    diag = res * math.sqrt(2.0)
    if params.connectivity == 8:
        moves = [(dr, dc, diag if dr and dc else res) for dr, dc in _OFFSETS_8]
    else:
        moves = [(dr, dc, res) for dr, dc in _OFFSETS_4]

    n = rows * cols
    g_score = [math.inf] * n
    g_score[sidx] = 0.0
    came_from = {sidx: (-1, hgt[sidx], LocomotionMode.GROUND)}
    closed = bytearray(n)

    h0 = max(0.0, goal_distance(*start_cell) - threshold)
    open_heap = [(h0, h0, sidx)]
    heappush, heappop = heapq.heappush, heapq.heappop
    isnan = math.isnan

    while open_heap:
        _, _, idx = heappop(open_heap)
        if closed[idx]:
            continue
        closed[idx] = 1
        r, c = divmod(idx, cols)
        if goal_distance(r, c) <= threshold:
            return _reconstruct(idx, came_from, g_score[idx], meta, cols)

        g_cur = g_score[idx]
        e_c = hgt[idx]
        cur_ground = cost[idx] < le
        for dr, dc, step_len in moves:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < rows and 0 <= nc < cols):
                continue
            nidx = nr * cols + nc
            if closed[nidx]:
                continue
            e_n = hgt[nidx]
            if isnan(e_n):
                continue
            cn = cost[nidx]
            if cn == math.inf:
                continue
            if cn >= le:
                zf = maxe[nidx]
                if isnan(zf):
                    continue
                # grouped like step_cost() so both accumulate bit-identically
                g_new = g_cur + (step_len + cn * round(abs(e_c - e_n) / res) + cle_a + cn)
                z = zf + cl
                flag = LocomotionMode.AERIAL
            else:
                if dr and dc and cur_ground:
                    # no corner cutting between ground cells past aerial cells
                    if cost[r * cols + nc] >= le or cost[nr * cols + c] >= le:
                        continue
                g_new = g_cur + (step_len + cn)
                z = e_n
                flag = LocomotionMode.GROUND
            if g_new < g_score[nidx]:
                g_score[nidx] = g_new
                came_from[nidx] = (idx, z, flag)
                hn = hypot((nr + 0.5) * res - off_x, (nc + 0.5) * res - off_y)
                hn = hn - threshold
                if hn < 0.0:
                    hn = 0.0
                heappush(open_heap, (g_new + hn, hn, nidx))

    raise NoPathError(f"no path from {start} to {goal}")


def _reconstruct(idx: int, came_from: dict, total_g: float,
                 meta, cols: int) -> ModalPath:
    chain = []
    while idx != -1:
        parent, z, flag = came_from[idx]
        chain.append((idx, z, flag))
        idx = parent
    chain.reverse()
    waypoints = []
    for cell_idx, z, flag in chain:
        x, y = grid_to_world(divmod(cell_idx, cols), meta)
        waypoints.append(ModalWaypoint(x, y, float(z), flag))
    return ModalPath(waypoints, total_g)
