"""Energy, time, and length accounting, plus the drone-only comparator.

Per-meter costs are power over speed for each mode; a morph costs the servo
power held for the morph duration. The drone comparator always climbs above
the tallest obstacle on the map, flies straight, and lands at the goal, so
it pays flight cost for the whole trip but never morphs.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .costmap import ModalCostmap
from .gridmap import ElevationGrid, world_to_grid
from .planner import LocomotionMode, ModalPath, PlannerParams

# Defaults match the comparison assumptions used throughout: 1 m/s in both
# modes, 1 W driving, 60 W flying, 30 W for 5 s per morph.
DEFAULT_DRIVE_POWER = 1.0
DEFAULT_FLY_POWER = 60.0
DEFAULT_MORPH_POWER = 30.0
DEFAULT_SPEED = 1.0
DEFAULT_MORPH_TIME = 5.0


@dataclass(frozen=True)
class EnergyModel:
    """Power draw and speeds for driving, flying, and morphing."""

    drive_power: float = DEFAULT_DRIVE_POWER
    drive_speed: float = DEFAULT_SPEED
    fly_power: float = DEFAULT_FLY_POWER
    fly_speed: float = DEFAULT_SPEED
    morph_power: float = DEFAULT_MORPH_POWER
    morph_time: float = DEFAULT_MORPH_TIME

    def __post_init__(self):
        for name in ("drive_power", "drive_speed", "fly_power", "fly_speed",
                     "morph_power", "morph_time"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class PlanMetrics:
    """Aggregate cost of following a plan."""

    energy: float
    time: float
    length: float
    morph_count: int

    def as_row(self) -> Tuple[float, float, float, int]:
        return (self.energy, self.time, self.length, self.morph_count)


def drive_cost_per_meter(model: EnergyModel) -> float:
    """Joules to drive one meter: drive power over drive speed."""
    return model.drive_power / model.drive_speed

def fly_cost_per_meter(model: EnergyModel) -> float:
    """Joules to fly one meter: fly power over fly speed."""
    return model.fly_power / model.fly_speed

def morph_cost(model: EnergyModel) -> float:
    """Joules per morph: constant servo power integrated over the morph time."""
    return model.morph_power * model.morph_time


def plan_metrics(path: ModalPath, model: EnergyModel = EnergyModel()) -> PlanMetrics:
    """Energy/time/length of a waypoint path.

    Each edge is billed to the mode of the waypoint it leads into (the mode
    the robot is in after morphing at the segment boundary). Morph count is
    the number of flag changes along the path.
    """
    waypoints = path.waypoints
    if len(waypoints) < 2:
        return PlanMetrics(0.0, 0.0, 0.0, 0)

    ground_len = 0.0
    aerial_len = 0.0
    morphs = 0
    for a, b in zip(waypoints[:-1], waypoints[1:]):
        d = math.dist(a.xyz, b.xyz)
        if b.flag is LocomotionMode.AERIAL:
            aerial_len += d
        else:
            ground_len += d
        if a.flag is not b.flag:
            morphs += 1

    energy = (ground_len * drive_cost_per_meter(model)
              + aerial_len * fly_cost_per_meter(model)
              + morphs * morph_cost(model))
    time = (ground_len / model.drive_speed
            + aerial_len / model.fly_speed
            + morphs * model.morph_time)
    return PlanMetrics(energy, time, ground_len + aerial_len, morphs)


def drone_baseline(elev: ElevationGrid, costmap: ModalCostmap,
                   start: Tuple[float, float], goal: Tuple[float, float],
                   model: EnergyModel = EnergyModel(),
                   params: PlannerParams = PlannerParams()) -> PlanMetrics:
    """Metrics for a pure flyer: climb, cruise straight, descend.

    Cruise altitude is the map's maximum observed elevation plus clearance;
    climb and descent legs start and end on the terrain under the start and
    goal. Everything is billed at flight cost with zero morphs.
    """
    start_cell = world_to_grid(start, elev.meta)
    goal_cell = world_to_grid(goal, elev.meta)

    observed = elev.height_at[elev.observed]
    map_max = float(observed.max()) if observed.size else 0.0
    cruise = map_max + params.clearance

    z_start = elev.height_at[start_cell]
    z_goal = elev.height_at[goal_cell]
    z_start = 0.0 if np.isnan(z_start) else float(z_start)
    z_goal = 0.0 if np.isnan(z_goal) else float(z_goal)

    climb = max(0.0, cruise - z_start)
    descent = max(0.0, cruise - z_goal)
    horizontal = math.dist(start, goal)

    length = climb + horizontal + descent
    energy = length * fly_cost_per_meter(model)
    time = length / model.fly_speed
    return PlanMetrics(energy, time, length, 0)
