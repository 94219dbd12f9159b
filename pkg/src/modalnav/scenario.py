"""Scenario runner: wire the full pipeline over a heightmap and write reports.

A scenario is a flat key=value config naming a heightmap, start/goal, and
any parameter overrides. Running it loads the terrain, scores
traversability, builds the costmap, plans, prunes, accounts energy against
the drone comparator, simulates execution, and writes deterministic text
reports (two runs of the same config produce byte-identical files).
"""

import json
import math
import os
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from .costmap import (DEFAULT_ENERGY_RATIO, DEFAULT_INFLATION_RADIUS,
                      ModalCostmap, generate_costmap)
from .energy import EnergyModel, PlanMetrics, drone_baseline, plan_metrics
from .executor import ExecutorParams, TraceEvent, execute
from .gridmap import (DEFAULT_VARIANCE_PRIOR, ElevationGrid, load_grid_layer,
                      load_heightmap, save_grid_layer)
from .perception import TraversabilityParams, compute_traversability
from .planner import (LocomotionMode, ModalPath, ModalWaypoint, PlannerParams,
                      plan)
from .postprocess import prune_path, supercover_cells


class ScenarioConfigError(ValueError):
    """Bad key, value, or missing file in a scenario config."""


class ScenarioStageError(RuntimeError):
    """A pipeline stage failed; carries the stage name and original error."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class ScenarioConfig:
    """Everything needed to run one scenario."""

    heightmap: str
    start: Tuple[float, float]
    goal: Tuple[float, float]
    name: str = "scenario"
    output_dir: str = "out"
    energy_ratio: float = DEFAULT_ENERGY_RATIO
    inflation_radius: int = DEFAULT_INFLATION_RADIUS
    variance_prior: float = DEFAULT_VARIANCE_PRIOR
    dt: float = 0.02
    traversability: TraversabilityParams = field(default_factory=TraversabilityParams)
    planner: PlannerParams = field(default_factory=PlannerParams)
    energy: EnergyModel = field(default_factory=EnergyModel)
    executor: ExecutorParams = field(default_factory=ExecutorParams)
    waypoint_tolerance: Optional[float] = None  # None -> one grid cell


# config key -> (target dataclass attribute on ScenarioConfig or sub-object, type)
_TOP_KEYS = {
    "name": ("name", str),
    "heightmap": ("heightmap", str),
    "output_dir": ("output_dir", str),
    "l_e": ("energy_ratio", float),
    "inflation_radius": ("inflation_radius", int),
    "variance_prior": ("variance_prior", float),
    "dt": ("dt", float),
    "waypoint_tolerance": ("waypoint_tolerance", float),
}
_TRAV_KEYS = {"max_slope": float, "max_step": float, "slope_weight": float,
              "step_weight": float, "window": int}
_PLANNER_KEYS = {"clearance": float, "aerial_extra_cost": float,
                 "goal_threshold": float, "connectivity": int}
_ENERGY_KEYS = {"drive_power": float, "drive_speed": float, "fly_power": float,
                "fly_speed": float, "morph_power": float, "morph_time": float}
_EXEC_KEYS = {"k_v": float, "k_omega": float, "omega_max": float,
              "stall_timeout": float, "wheelbase": float, "wheel_radius": float}


def parse_config_text(text: str) -> Dict[str, str]:
    """Flat `key = value` lines; `#` starts a comment; blank lines ignored."""
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScenarioConfigError(f"line {lineno}: expected `key = value`, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ScenarioConfigError(f"line {lineno}: empty key or value")
        values[key] = value
    return values


def config_from_values(values: Dict[str, str], base_dir: str = ".") -> ScenarioConfig:
    """Build a ScenarioConfig from string key/value pairs.

    Relative paths resolve against base_dir. Unknown keys are rejected so
    typos surface instead of silently using defaults.
    """
    required = ("heightmap", "start_x", "start_y", "goal_x", "goal_y")
    for key in required:
        if key not in values:
            raise ScenarioConfigError(f"missing required key {key!r}")

    cfg = ScenarioConfig(
        heightmap=values["heightmap"],
        start=(_parse_number("start_x", values["start_x"], float),
               _parse_number("start_y", values["start_y"], float)),
        goal=(_parse_number("goal_x", values["goal_x"], float),
              _parse_number("goal_y", values["goal_y"], float)),
    )
    trav: Dict[str, object] = {}
    planner_kw: Dict[str, object] = {}
    energy_kw: Dict[str, object] = {}
    exec_kw: Dict[str, object] = {}
    for key, raw in values.items():
        if key in ("start_x", "start_y", "goal_x", "goal_y"):
            continue
        if key in _TOP_KEYS:
            attr, kind = _TOP_KEYS[key]
            try:
                setattr(cfg, attr, kind(raw))
            except ValueError:
                raise ScenarioConfigError(f"key {key!r}: cannot parse {raw!r}") from None
        elif key in _TRAV_KEYS:
            trav[key] = _parse_number(key, raw, _TRAV_KEYS[key])
        elif key in _PLANNER_KEYS:
            planner_kw[key] = _parse_number(key, raw, _PLANNER_KEYS[key])
        elif key in _ENERGY_KEYS:
            energy_kw[key] = _parse_number(key, raw, _ENERGY_KEYS[key])
        elif key in _EXEC_KEYS:
            exec_kw[key] = _parse_number(key, raw, _EXEC_KEYS[key])
        else:
            raise ScenarioConfigError(f"unknown config key {key!r}")

    try:
        if trav:
            cfg.traversability = replace(cfg.traversability, **trav)
        if planner_kw:
            cfg.planner = replace(cfg.planner, **planner_kw)
        if energy_kw:
            cfg.energy = replace(cfg.energy, **energy_kw)
        if exec_kw:
            cfg.executor = replace(cfg.executor, **exec_kw)
    except ValueError as exc:
        raise ScenarioConfigError(str(exc)) from None

    if not os.path.isabs(cfg.heightmap):
        cfg.heightmap = os.path.normpath(os.path.join(base_dir, cfg.heightmap))
    if not os.path.isabs(cfg.output_dir):
        cfg.output_dir = os.path.normpath(os.path.join(base_dir, cfg.output_dir))
    return cfg


def _parse_number(key: str, raw: str, kind):
    try:
        return kind(raw)
    except ValueError:
        raise ScenarioConfigError(f"key {key!r}: cannot parse {raw!r}") from None


def load_scenario_config(path, overrides: Optional[Dict[str, str]] = None) -> ScenarioConfig:
    """Read a config file; overrides (e.g. from CLI flags) replace file values."""
    try:
        with open(path, "r") as f:
            text = f.read()
    except OSError as exc:
        raise ScenarioConfigError(f"cannot read config {path}: {exc}") from exc
    values = parse_config_text(text)
    if "name" not in values:
        values["name"] = os.path.splitext(os.path.basename(path))[0]
    if overrides:
        values.update(overrides)
    return config_from_values(values, base_dir=os.path.dirname(os.path.abspath(path)))


@dataclass
class ScenarioResult:
    """Everything a scenario run produced, plus where it was written."""

    config: ScenarioConfig
    costmap: ModalCostmap
    raw_path: ModalPath
    pruned_path: ModalPath
    m4_metrics: PlanMetrics
    drone_metrics: PlanMetrics
    trace: Optional[List[TraceEvent]]
    files: Dict[str, str]


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        raise ScenarioStageError(name, exc) from exc


def run_scenario(config: ScenarioConfig, simulate: bool = True) -> ScenarioResult:
    """Run the full pipeline and write the report files.

    Writes `<name>_path.txt/.json`, `<name>_metrics.csv`, `<name>_trace.csv`
    (when simulate is true), `<name>_costmap.txt`, and `<name>_costmap.ppm`
    under the config's output directory.
    """
    elev = _stage("load", load_heightmap, config.heightmap,
                  variance_prior=config.variance_prior)
    trav = _stage("traversability", compute_traversability, elev, config.traversability)
    costmap = _stage("costmap", generate_costmap, elev, trav,
                     aerial_energy_ratio=config.energy_ratio,
                     inflation_radius=config.inflation_radius)
    raw = _stage("plan", plan, costmap, elev, config.start, config.goal, config.planner)
    pruned = _stage("prune", prune_path, raw, costmap, elev, config.planner)
    m4 = _stage("metrics", plan_metrics, pruned, config.energy)
    drone = _stage("baseline", drone_baseline, elev, costmap,
                   config.start, config.goal, config.energy, config.planner)

    trace = None
    if simulate:
        tolerance = config.waypoint_tolerance
        if tolerance is None:
            tolerance = elev.meta.resolution
        exec_params = replace(config.executor, waypoint_tolerance=tolerance)
        trace = _stage("execute", execute, pruned, config.energy, config.dt, exec_params)

    os.makedirs(config.output_dir, exist_ok=True)
    prefix = os.path.join(config.output_dir, config.name)
    files = {}

    files["path_txt"] = prefix + "_path.txt"
    _stage("write", write_path_file, pruned, files["path_txt"])
    files["path_json"] = prefix + "_path.json"
    _stage("write", write_path_json, pruned, files["path_json"])
    files["metrics"] = prefix + "_metrics.csv"
    _stage("write", write_metrics_csv,
           [(config.name, "m4", m4), (config.name, "drone", drone)], files["metrics"])
    if trace is not None:
        files["trace"] = prefix + "_trace.csv"
        _stage("write", write_trace_csv, trace, files["trace"])
    files["costmap_txt"] = prefix + "_costmap.txt"
    _stage("write", save_grid_layer, costmap.meta, costmap.cost_at, files["costmap_txt"])
    files["costmap_ppm"] = prefix + "_costmap.ppm"
    _stage("render", render_costmap_ppm, costmap, pruned, files["costmap_ppm"])

    return ScenarioResult(config, costmap, raw, pruned, m4, drone, trace, files)


# --- serialization ----------------------------------------------------------


def write_path_file(path: ModalPath, out_path) -> None:
    """`x y z flag` per waypoint, flag G or A."""
    with open(out_path, "w") as f:
        for w in path.waypoints:
            f.write(f"{w.x:.6f} {w.y:.6f} {w.z:.6f} {w.flag.value}\n")


def read_path_file(in_path) -> ModalPath:
    waypoints = []
    flags = {m.value: m for m in LocomotionMode}
    with open(in_path, "r") as f:
        for lineno, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            tokens = raw.split()
            if len(tokens) != 4 or tokens[3] not in flags:
                raise ValueError(f"line {lineno}: expected `x y z G|A`, got {raw!r}")
            try:
                x, y, z = float(tokens[0]), float(tokens[1]), float(tokens[2])
            except ValueError:
                raise ValueError(f"line {lineno}: non-numeric coordinate") from None
            waypoints.append(ModalWaypoint(x, y, z, flags[tokens[3]]))
    return ModalPath(waypoints, math.nan)


def write_path_json(path: ModalPath, out_path) -> None:
    doc = {
        "total_g": path.total_g,
        "waypoints": [
            {"x": w.x, "y": w.y, "z": w.z, "flag": w.flag.value}
            for w in path.waypoints
        ],
    }
    with open(out_path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


def write_metrics_csv(rows, out_path) -> None:
    """Rows of (scenario, agent, PlanMetrics)."""
    with open(out_path, "w") as f:
        f.write("scenario,agent,energy_J,time_s,length_m,morphs\n")
        for scenario, agent, m in rows:
            f.write(f"{scenario},{agent},{m.energy:.6f},{m.time:.6f},"
                    f"{m.length:.6f},{m.morph_count}\n")


def write_trace_csv(trace: List[TraceEvent], out_path) -> None:
    with open(out_path, "w") as f:
        f.write("t,x,y,z,theta,mode,energy_J,event\n")
        for ev in trace:
            s = ev.state
            f.write(f"{ev.t:.6f},{s.x:.6f},{s.y:.6f},{s.z:.6f},{s.theta:.6f},"
                    f"{s.mode},{s.energy_spent:.6f},{ev.kind.value}\n")


# --- rendering ---------------------------------------------------------------

PATH_COLOR_GROUND = (255, 0, 255)
PATH_COLOR_AERIAL = (0, 255, 0)


def _cost_colors(costmap: ModalCostmap) -> np.ndarray:
    """Map costs to an HSV ramp: purple for cheap cells through red at L_e."""
    scale = costmap.aerial_energy_ratio
    if not math.isfinite(scale) or scale <= 0:
        scale = 60.0
    v = np.clip(costmap.cost_at / scale, 0.0, 1.0)
    hue = (1.0 - v) * (270.0 / 360.0)
    # saturated HSV -> RGB with s = v = 1
    h6 = hue * 6.0
    sector = np.floor(h6).astype(int) % 6
    frac = h6 - np.floor(h6)
    one = np.ones_like(frac)
    comps = [
        (one, frac, np.zeros_like(frac)),
        (1.0 - frac, one, np.zeros_like(frac)),
        (np.zeros_like(frac), one, frac),
        (np.zeros_like(frac), 1.0 - frac, one),
        (frac, np.zeros_like(frac), one),
        (one, np.zeros_like(frac), 1.0 - frac),
    ]
    rgb = np.zeros(costmap.cost_at.shape + (3,))
    for s, (rr, gg, bb) in enumerate(comps):
        mask = sector == s
        rgb[mask, 0] = rr[mask]
        rgb[mask, 1] = gg[mask]
        rgb[mask, 2] = bb[mask]
    return (rgb * 255).astype(np.uint8)


def render_costmap_ppm(costmap: ModalCostmap, path: Optional[ModalPath],
                       out_path) -> None:
    """Write a binary PPM: the cost ramp with the path cells painted over it."""
    image = _cost_colors(costmap)
    if path is not None and len(path.waypoints) >= 1:
        pairs = zip(path.waypoints[:-1], path.waypoints[1:])
        for a, b in pairs:
            color = (PATH_COLOR_AERIAL if b.flag is LocomotionMode.AERIAL
                     else PATH_COLOR_GROUND)
            for r, c in supercover_cells(a.xy, b.xy, costmap.meta):
                image[r, c] = color
    rows, cols = image.shape[:2]
    with open(out_path, "wb") as f:
        f.write(f"P6\n{cols} {rows}\n255\n".encode("ascii"))
        f.write(image.tobytes())
