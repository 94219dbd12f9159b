"""Point-measurement fusion into the elevation grid and classical traversability.

Heights are fused per cell with a 1-D Kalman update. Traversability comes
from slope and step filters over the height field instead of a learned
model: both depend only on height differences, so the score is invariant
to shifting the whole terrain up or down.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np
from scipy import ndimage

from .gridmap import ElevationGrid, TraversabilityGrid, world_to_grid


@dataclass(frozen=True)
class PointMeasurement:
    """One height observation: world (x, y, z) plus sensor variance on z."""

    x: float
    y: float
    z: float
    variance: float

    def __post_init__(self):
        if self.variance <= 0.0:
            raise ValueError(f"measurement variance must be positive, got {self.variance}")


@dataclass(frozen=True)
class TraversabilityParams:
    """Thresholds and weights for the slope/step filters.

    max_slope is the steepest drivable surface angle (radians); max_step the
    largest height discontinuity a wheel can climb (meters). window is the
    odd side length of the step-filter neighborhood in cells.
    """

    max_slope: float = 0.35
    max_step: float = 0.08
    slope_weight: float = 0.5
    step_weight: float = 0.5
    window: int = 3

    def __post_init__(self):
        if abs(self.slope_weight + self.step_weight - 1.0) > 1e-9:
            raise ValueError("slope_weight and step_weight must sum to 1")
        if not (0.0 <= self.slope_weight <= 1.0):
            raise ValueError("weights must lie in [0, 1]")
        if self.window < 1 or self.window % 2 == 0:
            raise ValueError(f"window must be odd and >= 1, got {self.window}")
        if self.max_slope <= 0.0 or self.max_step <= 0.0:
            raise ValueError("max_slope and max_step must be positive")


def fuse_point(grid: ElevationGrid, m: PointMeasurement) -> Tuple[int, int]:
    """Fuse one measurement into its cell with a 1-D Kalman update.

    An unobserved cell initializes to (z, variance). Otherwise:

        h' = (s_m * h + s * z) / (s + s_m)
        s' = s * s_m / (s + s_m)

    with s the cell variance and s_m the measurement variance. Returns the
    updated cell index. Raises OutOfBoundsError when the measurement falls
    outside the map.
    """
    r, c = world_to_grid((m.x, m.y), grid.meta)
    h = grid.height_at[r, c]
    s = grid.variance_at[r, c]
    if np.isnan(h):
        grid.height_at[r, c] = m.z
        grid.variance_at[r, c] = m.variance
    else:
        denom = s + m.variance
        grid.height_at[r, c] = (m.variance * h + s * m.z) / denom
        grid.variance_at[r, c] = (s * m.variance) / denom
    return (r, c)


def fuse_points(grid: ElevationGrid, measurements: Iterable[PointMeasurement]) -> int:
    """Fuse a batch of measurements; returns how many were applied."""
    n = 0
    for m in measurements:
        fuse_point(grid, m)
        n += 1
    return n


def load_point_stream(path) -> list:
    """Read `x y z variance` lines into PointMeasurement objects."""
    points = []
    with open(path, "r") as f:
        for lineno, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            tokens = raw.split()
            if len(tokens) != 4:
                raise ValueError(f"line {lineno}: expected `x y z variance`, got {raw!r}")
            x, y, z, var = (float(t) for t in tokens)
            points.append(PointMeasurement(x, y, z, var))
    return points


def compute_traversability(grid: ElevationGrid,
                           params: TraversabilityParams = TraversabilityParams()) -> TraversabilityGrid:
    """Score every cell with weighted slope and step filters.

    slope score: 1 - slope/max_slope, clamped to [0, 1], where slope is the
    surface angle from the central-difference gradient (one-sided at the
    map border). step score: 1 - d/max_step clamped, with d the largest
    absolute height difference to any cell in the window. Cells that are
    unobserved, or have unobserved data within their neighborhood, score 0.
    """
    h = grid.height_at
    res = grid.meta.resolution
    observed = grid.observed

    filled = np.where(observed, h, 0.0)

    gx, gy = np.gradient(filled, res)
    slope = np.arctan(np.hypot(gx, gy))
    slope_score = np.clip(1.0 - slope / params.max_slope, 0.0, 1.0)

    # Largest |height difference| within the window, via grey dilation/erosion.
    size = (params.window, params.window)
    local_max = ndimage.maximum_filter(filled, size=size, mode="nearest")
    local_min = ndimage.minimum_filter(filled, size=size, mode="nearest")
    step = np.maximum(local_max - filled, filled - local_min)
    step_score = np.clip(1.0 - step / params.max_step, 0.0, 1.0)

    score = params.slope_weight * slope_score + params.step_weight * step_score

    # Zero out anything touching unobserved data. The mask window covers at
    # least the 3x3 reach of the gradient stencil.
    mask_size = max(params.window, 3)
    valid = ndimage.minimum_filter(observed.astype(np.uint8), size=(mask_size, mask_size),
                                   mode="constant", cval=1)
    score = np.where(observed & (valid > 0), score, 0.0)

    return TraversabilityGrid(grid.meta, np.clip(score, 0.0, 1.0))
