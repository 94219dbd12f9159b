"""Authored benchmark terrains: hilly, step, enclosure, and maze.

All four live on a 20 m x 20 m grid at 0.1 m resolution. The step world is
a full-width raised band with no flat way around; the enclosure is a walled
square whose gaps are too narrow to drive through; the maze is drivable end
to end but only by a long detour, with one landable wall top that an
energy-optimal plan has no reason to use.
"""

import sys

import numpy as np

from .gridmap import ElevationGrid, GridMeta

DEFAULT_RESOLUTION = 0.1
DEFAULT_EXTENT = 20.0
WALL_HEIGHT = 1.5


def _flat_meta(extent: float = DEFAULT_EXTENT, resolution: float = DEFAULT_RESOLUTION) -> GridMeta:
    return GridMeta(resolution, extent, extent, (0.0, 0.0))


def _cell_centers(meta: GridMeta):
    xs = (np.arange(meta.rows) + 0.5) * meta.resolution - meta.height / 2.0 - meta.origin[0]
    ys = (np.arange(meta.cols) + 0.5) * meta.resolution - meta.width / 2.0 - meta.origin[1]
    return np.meshgrid(xs, ys, indexing="ij")


def _fill_rect(heights: np.ndarray, meta: GridMeta, x0: float, x1: float,
               y0: float, y1: float, value: float) -> None:
    """Set cells whose centers fall inside [x0, x1) x [y0, y1)."""
    cx, cy = _cell_centers(meta)
    mask = (cx >= x0) & (cx < x1) & (cy >= y0) & (cy < y1)
    heights[mask] = value


def flat_terrain(extent: float = DEFAULT_EXTENT,
                 resolution: float = DEFAULT_RESOLUTION) -> ElevationGrid:
    meta = _flat_meta(extent, resolution)
    return ElevationGrid.from_heights(meta, np.zeros(meta.shape))


def hilly_terrain(extent: float = DEFAULT_EXTENT,
                  resolution: float = DEFAULT_RESOLUTION) -> ElevationGrid:
    """Smooth bumps; the taller ones are too steep to drive straight over."""
    meta = _flat_meta(extent, resolution)
    cx, cy = _cell_centers(meta)
    heights = 0.05 * (np.sin(cx * 0.8) * np.sin(cy * 0.8) + 1.0)
    bumps = [
        (-4.0, -4.0, 0.8, 1.4),
        (3.0, -2.0, 0.6, 1.8),
        (-1.0, 4.0, 0.9, 1.6),
        (5.0, 5.0, 0.5, 2.2),
        (0.5, -6.0, 0.7, 1.5),
    ]
    for bx, by, amp, sigma in bumps:
        heights += amp * np.exp(-((cx - bx) ** 2 + (cy - by) ** 2) / (2.0 * sigma ** 2))
    return ElevationGrid.from_heights(meta, heights)


def step_terrain(extent: float = DEFAULT_EXTENT,
                 resolution: float = DEFAULT_RESOLUTION) -> ElevationGrid:
    """A raised plateau band across the full map width; no flat bypass."""
    meta = _flat_meta(extent, resolution)
    heights = np.zeros(meta.shape)
    half = extent / 2.0
    _fill_rect(heights, meta, -2.0, 3.0, -half, half, WALL_HEIGHT)
    return ElevationGrid.from_heights(meta, heights)


def enclosure_terrain(extent: float = DEFAULT_EXTENT,
                      resolution: float = DEFAULT_RESOLUTION) -> ElevationGrid:
    """A square wall ring around (3, 0) with sub-robot gaps mid-side."""
    meta = _flat_meta(extent, resolution)
    heights = np.zeros(meta.shape)
    cx, cy = 3.0, 0.0
    # gap of two cells: narrower than the traversability window, so wheels
    # cannot fit through even before inflation
    outer, thickness, gap = 3.0, 0.3, 0.2
    inner = outer - thickness

    _fill_rect(heights, meta, cx - outer, cx - inner, cy - outer, cy + outer, WALL_HEIGHT)
    _fill_rect(heights, meta, cx + inner, cx + outer, cy - outer, cy + outer, WALL_HEIGHT)
    _fill_rect(heights, meta, cx - outer, cx + outer, cy - outer, cy - inner, WALL_HEIGHT)
    _fill_rect(heights, meta, cx - outer, cx + outer, cy + inner, cy + outer, WALL_HEIGHT)
    # one narrow gap per side, centered
    _fill_rect(heights, meta, cx - outer, cx - inner, cy - gap / 2, cy + gap / 2, 0.0)
    _fill_rect(heights, meta, cx + inner, cx + outer, cy - gap / 2, cy + gap / 2, 0.0)
    _fill_rect(heights, meta, cx - gap / 2, cx + gap / 2, cy - outer, cy - inner, 0.0)
    _fill_rect(heights, meta, cx - gap / 2, cx + gap / 2, cy + inner, cy + outer, 0.0)
    return ElevationGrid.from_heights(meta, heights)


def maze_terrain(extent: float = DEFAULT_EXTENT,
                 resolution: float = DEFAULT_RESOLUTION) -> ElevationGrid:
    """Two offset walls force an S-shaped drive; the first wall top is landable."""
    meta = _flat_meta(extent, resolution)
    heights = np.zeros(meta.shape)
    half = extent / 2.0
    # first wall: thick enough that its top keeps a drivable strip
    _fill_rect(heights, meta, -4.0, -3.2, -half, 4.0, WALL_HEIGHT)
    # second wall: passage at the bottom
    _fill_rect(heights, meta, 2.0, 2.6, -4.0, half, WALL_HEIGHT)
    return ElevationGrid.from_heights(meta, heights)


# scenario name -> (terrain builder, start xy, goal xy)
SCENARIOS = {
    "hilly": (hilly_terrain, (-8.0, -8.0), (8.0, 8.0)),
    "step": (step_terrain, (-7.0, 0.0), (7.0, 0.0)),
    "enclosure": (enclosure_terrain, (-7.0, 0.0), (3.0, 0.0)),
    "maze": (maze_terrain, (-8.0, -8.0), (8.0, 8.0)),
}


def build_terrain(name: str) -> ElevationGrid:
    builder, _, _ = SCENARIOS[name]
    return builder()


def write_fixtures(out_dir) -> list:
    """Write heightmaps and scenario configs for all benchmark terrains."""
    import os

    from .gridmap import save_heightmap

    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, (builder, start, goal) in SCENARIOS.items():
        grid = builder()
        heightmap = os.path.join(out_dir, f"{name}.txt")
        save_heightmap(grid, heightmap)
        config = os.path.join(out_dir, f"{name}.cfg")
        with open(config, "w") as f:
            f.write(f"name = {name}\n")
            f.write(f"heightmap = {name}.txt\n")
            f.write(f"start_x = {start[0]}\nstart_y = {start[1]}\n")
            f.write(f"goal_x = {goal[0]}\ngoal_y = {goal[1]}\n")
            f.write(f"output_dir = out/{name}\n")
        written.extend([heightmap, config])
    return written


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "fixtures"
    for path in write_fixtures(target):
        print(path)
