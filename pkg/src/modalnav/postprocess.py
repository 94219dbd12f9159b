"""Path post-processing: partition by locomotion mode, prune, verify clearance.

Pruning works strictly inside single-mode partitions, so the waypoints where
the robot morphs (the first and last of every partition) are never touched.
Within a partition the pass walks backward from the tail, extending a
straight shortcut toward the current anchor for as long as the shortcut
stays collinear with the committed line or passes the edge-clearance check.
"""

import math
from dataclasses import dataclass
from typing import List, Tuple

from .costmap import ModalCostmap
from .gridmap import (ElevationGrid, GridMeta, UnobservedCellError,
                      max_elevation_footprint, world_to_grid_continuous)
from .planner import (LocomotionMode, ModalPath, ModalWaypoint, PlannerParams,
                      _resolve_aerial_threshold)

COLLINEAR_TOLERANCE = 1e-9
_T_EPS = 1e-12
_Z_SLACK = 1e-9


@dataclass
class PathPartition:
    """Maximal single-mode runs of a path, in order.

    boundaries[i] is the index (into the original path) of the last waypoint
    of segment i; those are the mode-transition waypoints.
    """

    segments: List[Tuple[LocomotionMode, List[ModalWaypoint]]]
    boundaries: List[int]


def partition_path(path: ModalPath) -> PathPartition:
    """Split a path into maximal runs of equal locomotion flag."""
    waypoints = path.waypoints
    if not waypoints:
        raise ValueError("cannot partition an empty path")
    segments = []
    boundaries = []
    run_start = 0
    for i in range(1, len(waypoints) + 1):
        if i == len(waypoints) or waypoints[i].flag is not waypoints[run_start].flag:
            segments.append((waypoints[run_start].flag, waypoints[run_start:i]))
            boundaries.append(i - 1)
            run_start = i
    return PathPartition(segments, boundaries)


def supercover_intervals(a: Tuple[float, float], b: Tuple[float, float],
                         meta: GridMeta) -> List[Tuple[int, int, float, float]]:
    """Every cell the segment a->b touches, with its crossing interval.

    Returns (row, col, t0, t1) tuples where [t0, t1] is the slice of the
    segment parameter spent inside the cell; corner touches come back with
    t0 == t1. Indices are clamped to the grid.
    """
    u0, v0 = world_to_grid_continuous(a, meta)
    u1, v1 = world_to_grid_continuous(b, meta)
    du, dv = u1 - u0, v1 - v0

    crossings = []  # (t, axis, boundary index)
    if du != 0.0:
        lo, hi = sorted((u0, u1))
        for k in range(math.floor(lo) + 1, math.ceil(hi)):
            t = (k - u0) / du
            if 0.0 < t < 1.0:
                crossings.append((t, 0, k))
    if dv != 0.0:
        lo, hi = sorted((v0, v1))
        for k in range(math.floor(lo) + 1, math.ceil(hi)):
            t = (k - v0) / dv
            if 0.0 < t < 1.0:
                crossings.append((t, 1, k))
    crossings.sort()

    # Merge crossings at (numerically) the same parameter: a group containing
    # both axes is a lattice-corner crossing.
    groups = []
    for t, axis, k in crossings:
        if groups and t - groups[-1][0] <= _T_EPS:
            groups[-1][1][axis] = k
        else:
            groups.append((t, {axis: k}))

    rows, cols = meta.shape

    def cell_at(t: float) -> Tuple[int, int]:
        r = math.floor(u0 + t * du)
        c = math.floor(v0 + t * dv)
        return (min(max(r, 0), rows - 1), min(max(c, 0), cols - 1))

    boundaries = [0.0] + [t for t, _ in groups] + [1.0]
    out = []
    seen = {}
    for t0, t1 in zip(boundaries[:-1], boundaries[1:]):
        if t1 - t0 <= _T_EPS:
            continue
        cell = cell_at((t0 + t1) / 2.0)
        if cell not in seen:
            seen[cell] = len(out)
            out.append((cell[0], cell[1], t0, t1))

    # Corner crossings additionally touch the two side cells at a single point.
    for t, axes in groups:
        if len(axes) == 2:
            ku, kv = axes[0], axes[1]
            for r, c in ((ku - 1, kv - 1), (ku - 1, kv), (ku, kv - 1), (ku, kv)):
                if 0 <= r < rows and 0 <= c < cols and (r, c) not in seen:
                    seen[(r, c)] = len(out)
                    out.append((r, c, t, t))
    return out


def supercover_cells(a: Tuple[float, float], b: Tuple[float, float],
                     meta: GridMeta) -> List[Tuple[int, int]]:
    """Cells touched by the segment a->b (corner touches included)."""
    return [(r, c) for r, c, _, _ in supercover_intervals(a, b, meta)]


def clear_edge(a: ModalWaypoint, b: ModalWaypoint, costmap: ModalCostmap,
               elev: ElevationGrid, params: PlannerParams = PlannerParams()) -> bool:
    """Can the straight edge a->b be traversed in its (shared) mode?

    GROUND: every touched cell must be ground-passable (cost below the
    aerial threshold). AERIAL: over every cell crossed for a nonzero stretch,
    the linearly interpolated altitude must reach the cell's footprint max
    elevation plus clearance at some point of the crossing; instantaneous
    corner touches are exempt. Boundaries are inclusive: altitude exactly at
    the required clearance passes.
    """
    if a.flag is not b.flag:
        raise ValueError("clear_edge endpoints must share a locomotion mode")
    le = _resolve_aerial_threshold(costmap, params)
    cells = supercover_intervals(a.xy, b.xy, costmap.meta)
    if a.flag is LocomotionMode.GROUND:
        cost = costmap.cost_at
        return all(cost[r, c] < le for r, c, _, _ in cells)

    dz = b.z - a.z
    for r, c, t0, t1 in cells:
        if t1 - t0 <= _T_EPS:
            continue
        try:
            required = max_elevation_footprint(elev, (r, c)) + params.clearance
        except UnobservedCellError:
            return False
        if max(a.z + t0 * dz, a.z + t1 * dz) + _Z_SLACK < required:
            return False
    return True


def _collinear(p: ModalWaypoint, q: ModalWaypoint, r: ModalWaypoint, aerial: bool) -> bool:
    """Cross-product collinearity; xy for ground edges, xyz for aerial ones."""
    ax, ay = q.x - p.x, q.y - p.y
    bx, by = r.x - p.x, r.y - p.y
    if not aerial:
        return abs(ax * by - ay * bx) < COLLINEAR_TOLERANCE
    az = q.z - p.z
    bz = r.z - p.z
    cx = ay * bz - az * by
    cy = az * bx - ax * bz
    cz = ax * by - ay * bx
    return math.sqrt(cx * cx + cy * cy + cz * cz) < COLLINEAR_TOLERANCE


def prune_partition(segment: List[ModalWaypoint], costmap: ModalCostmap,
                    elev: ElevationGrid,
                    params: PlannerParams = PlannerParams()) -> List[ModalWaypoint]:
    """Drop redundant waypoints from one single-mode run.

    Walking backward from the tail anchor, a waypoint is absorbed into the
    shortcut when it is collinear with the committed line (the shortcut then
    covers the same cells) or when the direct edge to the anchor passes
    clear_edge. On the first failure the last reachable waypoint becomes the
    new anchor. The first and last waypoints always survive, so transition
    waypoints never move.
    """
    if len(segment) <= 2:
        return list(segment)
    aerial = segment[0].flag is LocomotionMode.AERIAL

    kept_rev = [len(segment) - 1]
    anchor = len(segment) - 1
    while anchor > 0:
        reach = anchor - 1  # the raw step into the anchor is always traversable
        j = reach - 1
        while j >= 0:
            if _collinear(segment[j], segment[reach], segment[anchor], aerial):
                ok = True
            else:
                ok = clear_edge(segment[j], segment[anchor], costmap, elev, params)
            if not ok:
                break
            reach = j
            j -= 1
        kept_rev.append(reach)
        anchor = reach
    return [segment[k] for k in reversed(kept_rev)]


def prune_path(path: ModalPath, costmap: ModalCostmap, elev: ElevationGrid,
               params: PlannerParams = PlannerParams()) -> ModalPath:
    """Partition, prune every segment, and reassemble the path.

    The planner's accumulated cost is kept as-is: pruning only straightens
    geometry inside segments, it does not re-cost the path.
    """
    partition = partition_path(path)
    waypoints: List[ModalWaypoint] = []
    for mode, segment in partition.segments:
        pruned = prune_partition(segment, costmap, elev, params)
        waypoints.extend(pruned)
    return ModalPath(waypoints, path.total_g)


def validate_path(path: ModalPath, costmap: ModalCostmap, elev: ElevationGrid,
                  params: PlannerParams = PlannerParams()) -> List[str]:
    """Check a path against the clearance rules; returns human-readable violations."""
    problems = []
    for i, w in enumerate(path.waypoints):
        if w.flag is LocomotionMode.AERIAL:
            u, v = world_to_grid_continuous((w.x, w.y), costmap.meta)
            cell = (math.floor(u), math.floor(v))
            if not costmap.meta.contains_index(cell):
                problems.append(f"waypoint {i}: position outside the map")
                continue
            try:
                required = max_elevation_footprint(elev, cell) + params.clearance
            except UnobservedCellError:
                problems.append(f"waypoint {i}: aerial over unobserved terrain")
                continue
            if w.z + _Z_SLACK < required:
                problems.append(
                    f"waypoint {i}: altitude {w.z:.3f} below required {required:.3f}")
    for i in range(len(path.waypoints) - 1):
        a, b = path.waypoints[i], path.waypoints[i + 1]
        if a.flag is b.flag and not clear_edge(a, b, costmap, elev, params):
            problems.append(f"edge {i}->{i + 1}: fails clearance check")
    return problems
