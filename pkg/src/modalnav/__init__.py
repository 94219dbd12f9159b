"""Multimodal ground/aerial path planning over 2.5D elevation grids.

Pipeline: heightmap -> per-cell Kalman height fusion -> slope/step
traversability -> modal costmap with obstacle inflation -> energy-aware A*
with mode-tagged 3D waypoints -> partition/prune post-processing -> energy
accounting against a drone-only baseline -> kinematic execution.
"""

from .costmap import ModalCostmap, generate_costmap, inflate
from .energy import (EnergyModel, PlanMetrics, drive_cost_per_meter,
                     drone_baseline, fly_cost_per_meter, morph_cost,
                     plan_metrics)
from .executor import (EventKind, ExecutionStalledError, ExecutorParams,
                       RobotState, TraceEvent, diff_drive_control, execute,
                       wheel_commands)
from .gridmap import (ElevationGrid, GridMeta, GridMismatchError,
                      HeightmapFormatError, OutOfBoundsError,
                      TraversabilityGrid, UnobservedCellError,
                      grid_to_world, load_heightmap, max_elevation_footprint,
                      save_heightmap, world_to_grid)
from .perception import (PointMeasurement, TraversabilityParams,
                         compute_traversability, fuse_point, fuse_points)
from .planner import (LocomotionMode, ModalPath, ModalWaypoint, NoPathError,
                      PlannerParams, heuristic, neighbors, plan, step_cost)
from .postprocess import (PathPartition, clear_edge, partition_path,
                          prune_partition, prune_path, supercover_cells,
                          validate_path)
from .scenario import (ScenarioConfig, ScenarioResult, load_scenario_config,
                       run_scenario)

__version__ = "0.1.0"
