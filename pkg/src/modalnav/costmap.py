"""Multimodal locomotion costmap: cost assignment plus obstacle inflation.

Cells split into two families by traversability: drivable cells cost
``1 - traversability`` (so at most 0.5), and cells below the 0.5 threshold
are aerial-only and cost ``L_e + 0.01 * elevation``, where L_e is the
flying/driving energy ratio. Inflation then raises every cell within a
square neighborhood of an obstacle (any cell strictly above L_e) to at
least the obstacle's value.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .gridmap import ElevationGrid, GridMeta, GridMismatchError, TraversabilityGrid

DEFAULT_ENERGY_RATIO = 60.0
DEFAULT_INFLATION_RADIUS = 2
GROUND_THRESHOLD = 0.5


@dataclass
class ModalCostmap:
    """Per-cell traversal cost with the aerial/ground split baked in.

    base_at keeps the pre-inflation assignment so that inflation is
    idempotent: re-inflating always starts from the same obstacle set.
    """

    meta: GridMeta
    cost_at: np.ndarray
    base_at: np.ndarray
    aerial_energy_ratio: float = DEFAULT_ENERGY_RATIO
    inflation_radius: int = DEFAULT_INFLATION_RADIUS

    def is_aerial(self, idx) -> bool:
        """A cell is aerial-only when its (inflated) cost reaches L_e."""
        return bool(self.cost_at[idx] >= self.aerial_energy_ratio)


def generate_costmap(elev: ElevationGrid, trav: TraversabilityGrid,
                     aerial_energy_ratio: float = DEFAULT_ENERGY_RATIO,
                     inflation_radius: int = DEFAULT_INFLATION_RADIUS) -> ModalCostmap:
    """Fuse elevation and traversability into the modal costmap, then inflate.

    Per cell: traversability below 0.5 marks terrain the wheels cannot take,
    so the cell costs ``L_e + elevation * 0.01`` (the elevation term keeps
    taller obstacles more expensive); otherwise the cell costs
    ``1 - traversability``. Unobserved elevation contributes 0 to the aerial
    term. Raises GridMismatchError when the two layers disagree on geometry.
    """
    if elev.meta != trav.meta:
        raise GridMismatchError(
            f"elevation meta {elev.meta} does not match traversability meta {trav.meta}")
    if inflation_radius < 0:
        raise ValueError("inflation_radius must be >= 0")

    elevation = np.nan_to_num(elev.height_at, nan=0.0)
    base = np.where(trav.score_at < GROUND_THRESHOLD,
                    aerial_energy_ratio + elevation * 0.01,
                    1.0 - trav.score_at)

    costmap = ModalCostmap(elev.meta, base.copy(), base,
                           aerial_energy_ratio=aerial_energy_ratio,
                           inflation_radius=inflation_radius)
    return inflate(costmap)


def inflate(costmap: ModalCostmap) -> ModalCostmap:
    """Spread obstacle values over their square neighborhood.

    Obstacles are cells whose pre-inflation value lies strictly above L_e;
    every cell within Chebyshev distance ``inflation_radius`` of one is
    raised to at least the largest such obstacle value. Idempotent because
    obstacles are always identified on the pre-inflation layer.
    """
    base = costmap.base_at
    radius = costmap.inflation_radius
    obstacles = base > costmap.aerial_energy_ratio
    if radius == 0 or not obstacles.any():
        return ModalCostmap(costmap.meta, base.copy(), base,
                            costmap.aerial_energy_ratio, radius)

    spread = np.where(obstacles, base, -np.inf)
    spread = ndimage.maximum_filter(spread, size=2 * radius + 1, mode="constant", cval=-np.inf)
    inflated = np.maximum(base, spread)
    return ModalCostmap(costmap.meta, inflated, base,
                        costmap.aerial_energy_ratio, radius)
