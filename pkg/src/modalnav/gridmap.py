"""2.5D grid container, world/grid coordinate transforms, and heightmap file I/O.

The world frame is metric. Grid indices are (row, col) with row 0 at the
minimum-x edge of the map and col 0 at the minimum-y edge; a cell index maps
back to the world position of the cell center. Unobserved cells are NaN,
never a silent zero.
"""

import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

# Nudge added to world->grid quotients before flooring so positions sitting
# exactly on a cell boundary don't land one cell short (2.3/0.1 == 22.999...).
_EDGE_EPS = 1e-9

DEFAULT_VARIANCE_PRIOR = 0.04  # m^2, prior for cells loaded from file


class OutOfBoundsError(ValueError):
    """World position or cell index outside the map extent."""


class UnobservedCellError(ValueError):
    """Operation needs height data where none has been observed."""


class HeightmapFormatError(ValueError):
    """Heightmap text failed to parse; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GridMismatchError(ValueError):
    """Two grid layers that must share geometry do not."""


@dataclass(frozen=True)
class GridMeta:
    """Geometry of one grid layer.

    height/width are the metric x/y extents of the map; origin is an offset
    of the world frame relative to the map center (meters). Row/column
    counts are derived, so ``rows == round(height / resolution)`` holds by
    construction.
    """

    resolution: float
    height: float
    width: float
    origin: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.resolution <= 0.0:
            raise ValueError(f"resolution must be positive, got {self.resolution}")
        if self.height <= 0.0 or self.width <= 0.0:
            raise ValueError("map extent must be positive")

    @property
    def rows(self) -> int:
        return int(round(self.height / self.resolution))

    @property
    def cols(self) -> int:
        return int(round(self.width / self.resolution))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.rows, self.cols)

    @classmethod
    def from_shape(cls, rows: int, cols: int, resolution: float,
                   origin: Tuple[float, float] = (0.0, 0.0)) -> "GridMeta":
        return cls(resolution, rows * resolution, cols * resolution, origin)

    def contains_index(self, idx: Tuple[int, int]) -> bool:
        r, c = idx
        return 0 <= r < self.rows and 0 <= c < self.cols


def world_to_grid(pos: Tuple[float, float], meta: GridMeta) -> Tuple[int, int]:
    """Map a world (x, y) position to the (row, col) cell containing it.

    The transform shifts by half the map extent plus the origin offset and
    divides by the resolution; indices are floored so cells cover half-open
    intervals. Raises OutOfBoundsError outside the map extent.
    """
    x, y = pos
    r = math.floor((meta.height / 2.0 + meta.origin[0] + x) / meta.resolution + _EDGE_EPS)
    c = math.floor((meta.width / 2.0 + meta.origin[1] + y) / meta.resolution + _EDGE_EPS)
    if not (0 <= r < meta.rows and 0 <= c < meta.cols):
        raise OutOfBoundsError(f"position ({x}, {y}) is outside the map extent")
    return (r, c)


def grid_to_world(idx: Tuple[int, int], meta: GridMeta) -> Tuple[float, float]:
    """World (x, y) of the center of cell (row, col). Inverse of world_to_grid."""
    r, c = idx
    if not meta.contains_index(idx):
        raise OutOfBoundsError(f"cell index ({r}, {c}) is outside the grid")
    x = (r + 0.5) * meta.resolution - meta.height / 2.0 - meta.origin[0]
    y = (c + 0.5) * meta.resolution - meta.width / 2.0 - meta.origin[1]
    return (x, y)


def world_to_grid_continuous(pos: Tuple[float, float], meta: GridMeta) -> Tuple[float, float]:
    """Continuous (fractional) grid coordinates of a world position.

    Unlike world_to_grid this does not floor or bounds-check; cell (r, c)
    spans [r, r+1) x [c, c+1) in these coordinates.
    """
    x, y = pos
    u = (meta.height / 2.0 + meta.origin[0] + x) / meta.resolution
    v = (meta.width / 2.0 + meta.origin[1] + y) / meta.resolution
    return (u, v)


@dataclass
class ElevationGrid:
    """Height field with per-cell variance. NaN marks unobserved cells."""

    meta: GridMeta
    height_at: np.ndarray
    variance_at: np.ndarray

    def __post_init__(self):
        expected = self.meta.shape
        if self.height_at.shape != expected or self.variance_at.shape != expected:
            raise GridMismatchError(
                f"layer shape {self.height_at.shape} does not match meta {expected}")

    @classmethod
    def empty(cls, meta: GridMeta) -> "ElevationGrid":
        shape = meta.shape
        return cls(meta, np.full(shape, np.nan), np.full(shape, np.nan))

    @classmethod
    def from_heights(cls, meta: GridMeta, heights, variance: float = DEFAULT_VARIANCE_PRIOR) -> "ElevationGrid":
        h = np.asarray(heights, dtype=float)
        var = np.where(np.isnan(h), np.nan, float(variance))
        return cls(meta, h.copy(), var)

    @property
    def observed(self) -> np.ndarray:
        return ~np.isnan(self.height_at)

    def copy(self) -> "ElevationGrid":
        return ElevationGrid(self.meta, self.height_at.copy(), self.variance_at.copy())


@dataclass
class TraversabilityGrid:
    """Per-cell ground traversability score in [0, 1]; unobserved terrain scores 0."""

    meta: GridMeta
    score_at: np.ndarray

    def __post_init__(self):
        if self.score_at.shape != self.meta.shape:
            raise GridMismatchError(
                f"layer shape {self.score_at.shape} does not match meta {self.meta.shape}")
        if not np.all(np.isfinite(self.score_at)):
            raise ValueError("traversability scores must be finite")
        if np.any(self.score_at < -1e-12) or np.any(self.score_at > 1.0 + 1e-12):
            raise ValueError("traversability scores must lie in [0, 1]")


def max_elevation_footprint(grid: ElevationGrid, idx: Tuple[int, int]) -> float:
    """Max observed height over the 2x2 block {(r,c),(r+1,c),(r,c+1),(r+1,c+1)}.

    The block clamps to in-bounds cells at the grid edge. Raises
    UnobservedCellError when no cell of the block has been observed.
    """
    r, c = idx
    if not grid.meta.contains_index(idx):
        raise OutOfBoundsError(f"cell index ({r}, {c}) is outside the grid")
    block = grid.height_at[r:r + 2, c:c + 2]
    values = block[~np.isnan(block)]
    if values.size == 0:
        raise UnobservedCellError(f"footprint at ({r}, {c}) is entirely unobserved")
    return float(values.max())


def footprint_max_field(grid: ElevationGrid) -> np.ndarray:
    """Vectorized max_elevation_footprint for every cell; NaN where the block is unobserved."""
    padded = np.pad(grid.height_at, ((0, 1), (0, 1)), constant_values=np.nan)
    return np.fmax(
        np.fmax(padded[:-1, :-1], padded[1:, :-1]),
        np.fmax(padded[:-1, 1:], padded[1:, 1:]),
    )


# --- text grid format ------------------------------------------------------
#
# line 1:  rows cols resolution origin_x origin_y
# then `rows` lines of `cols` space-separated decimal values; the token
# `nan` marks an unobserved cell. Values serialize with 6 decimal places.


def load_grid_layer(path) -> Tuple[GridMeta, np.ndarray]:
    """Read the text grid format; returns (meta, values) with NaN for `nan` tokens."""
    with open(path, "r") as f:
        lines = f.read().splitlines()
    if not lines or not lines[0].strip():
        raise HeightmapFormatError("missing header", line=1)

    header = lines[0].split()
    if len(header) != 5:
        raise HeightmapFormatError(
            f"header needs `rows cols resolution origin_x origin_y`, got {len(header)} fields", line=1)
    try:
        rows, cols = int(header[0]), int(header[1])
        resolution = float(header[2])
        origin = (float(header[3]), float(header[4]))
    except ValueError as exc:
        raise HeightmapFormatError(f"bad header value: {exc}", line=1) from None
    if rows <= 0 or cols <= 0:
        raise HeightmapFormatError("rows and cols must be positive", line=1)
    if resolution <= 0:
        raise HeightmapFormatError("resolution must be positive", line=1)

    data_lines = [l for l in lines[1:] if l.strip()]
    if len(data_lines) != rows:
        raise HeightmapFormatError(
            f"expected {rows} data rows, found {len(data_lines)}", line=len(lines))

    values = np.empty((rows, cols), dtype=float)
    for i, raw in enumerate(data_lines):
        tokens = raw.split()
        if len(tokens) != cols:
            raise HeightmapFormatError(
                f"expected {cols} values, found {len(tokens)}", line=i + 2)
        for j, tok in enumerate(tokens):
            try:
                values[i, j] = float(tok)
            except ValueError:
                raise HeightmapFormatError(f"non-numeric cell {tok!r}", line=i + 2) from None

    meta = GridMeta.from_shape(rows, cols, resolution, origin)
    return meta, values


def save_grid_layer(meta: GridMeta, values: np.ndarray, path) -> None:
    """Write a 2D layer in the text grid format (6 decimal places, `nan` for NaN)."""
    if values.shape != meta.shape:
        raise GridMismatchError(f"layer shape {values.shape} does not match meta {meta.shape}")
    with open(path, "w") as f:
        f.write(f"{meta.rows} {meta.cols} {meta.resolution:.6f} "
                f"{meta.origin[0]:.6f} {meta.origin[1]:.6f}\n")
        for row in values:
            f.write(" ".join("nan" if np.isnan(v) else f"{v:.6f}" for v in row))
            f.write("\n")


def load_heightmap(path, variance_prior: float = DEFAULT_VARIANCE_PRIOR) -> ElevationGrid:
    """Load a heightmap file into an ElevationGrid.

    Observed cells get `variance_prior` as their initial variance; `nan`
    cells stay unobserved.
    """
    meta, heights = load_grid_layer(path)
    return ElevationGrid.from_heights(meta, heights, variance=variance_prior)


def save_heightmap(grid: ElevationGrid, path) -> None:
    save_grid_layer(grid.meta, grid.height_at, path)
