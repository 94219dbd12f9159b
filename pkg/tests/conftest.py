"""Shared builders and the brute-force Dijkstra oracle."""

import heapq
import math

import numpy as np
import pytest

from modalnav.costmap import ModalCostmap, generate_costmap
from modalnav.gridmap import (ElevationGrid, GridMeta, TraversabilityGrid,
                              grid_to_world, world_to_grid)
from modalnav.planner import PlannerParams, neighbors, step_cost


def flat_scene(n=10, res=0.1, le=60.0, inflation=2):
    """Fully traversable flat world."""
    meta = GridMeta.from_shape(n, n, res)
    elev = ElevationGrid.from_heights(meta, np.zeros((n, n)))
    trav = TraversabilityGrid(meta, np.ones((n, n)))
    cm = generate_costmap(elev, trav, aerial_energy_ratio=le, inflation_radius=inflation)
    return elev, trav, cm


def wall_scene(n=21, res=0.1, wall_height=1.5, wall_row=None, inflation=2):
    """Flat world bisected by a full-width aerial-only wall."""
    if wall_row is None:
        wall_row = n // 2
    meta = GridMeta.from_shape(n, n, res)
    heights = np.zeros((n, n))
    heights[wall_row, :] = wall_height
    scores = np.ones((n, n))
    scores[max(0, wall_row - 1):wall_row + 2, :] = 0.0
    elev = ElevationGrid.from_heights(meta, heights)
    trav = TraversabilityGrid(meta, scores)
    cm = generate_costmap(elev, trav, inflation_radius=inflation)
    return elev, trav, cm


def random_scene(seed, n=30, res=0.1):
    """Random but spatially coherent traversability and elevation.

    Smoothed noise keeps aerial regions blob-shaped, so inflation does not
    flood the whole map; roughly two-thirds of cells stay ground-passable.
    """
    from scipy import ndimage

    rng = np.random.default_rng(seed)
    meta = GridMeta.from_shape(n, n, res)
    heights = ndimage.uniform_filter(rng.uniform(0.0, 4.0, (n, n)), size=3,
                                     mode="nearest")
    scores = ndimage.uniform_filter(rng.random((n, n)), size=5, mode="nearest")
    scores = np.clip((scores - 0.5) * 1.8 + 0.62, 0.0, 1.0)
    elev = ElevationGrid.from_heights(meta, heights)
    trav = TraversabilityGrid(meta, scores)
    cm = generate_costmap(elev, trav)
    return elev, trav, cm, rng


def random_query(cm, elev, rng, params=PlannerParams()):
    """Random ground-classified start/goal cells as world coordinates."""
    le = cm.aerial_energy_ratio
    ground = np.argwhere(cm.cost_at < le)
    if len(ground) < 2:
        return None
    picks = rng.choice(len(ground), size=2, replace=False)
    start = grid_to_world(tuple(ground[picks[0]]), cm.meta)
    goal = grid_to_world(tuple(ground[picks[1]]), cm.meta)
    return start, goal


def dijkstra_cost(costmap, elev, start_xy, goal_xy, params=PlannerParams()):
    """Reference search: plain Dijkstra over the identical step-cost graph.

    Pops in order of pure g, so the first cell popped inside the goal disc
    carries the minimum reachable cost. Returns None when unreachable.
    """
    meta = costmap.meta
    start = world_to_grid(start_xy, meta)
    world_to_grid(goal_xy, meta)
    threshold = params.goal_threshold
    if threshold is None:
        threshold = meta.resolution * math.sqrt(2.0)

    dist = {start: 0.0}
    heap = [(0.0, start)]
    done = set()
    while heap:
        g, cell = heapq.heappop(heap)
        if cell in done:
            continue
        done.add(cell)
        cx, cy = grid_to_world(cell, meta)
        if math.hypot(cx - goal_xy[0], cy - goal_xy[1]) <= threshold:
            return g
        for nb in neighbors(cell, costmap, elev, params):
            if nb in done:
                continue
            inc, _, _ = step_cost(cell, nb, costmap, elev, params)
            ng = g + inc
            if ng < dist.get(nb, math.inf):
                dist[nb] = ng
                heapq.heappush(heap, (ng, nb))
    return None
