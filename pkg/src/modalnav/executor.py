"""Discrete-time kinematic execution of a mode-tagged waypoint path.

Ground segments run a P-controlled differential drive (unicycle
integration); aerial segments fly straight at constant speed; a flag change
inserts a stationary morph dwell of exactly the model's morph time. Energy
integrates the active mode's power over moving time plus the lump morph
cost, so for straight segments the trace converges to plan_metrics as the
step size shrinks.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import List, Tuple

from .energy import EnergyModel, morph_cost
from .planner import LocomotionMode, ModalPath, ModalWaypoint

MODE_MORPHING = "M"
_PROGRESS_EPS = 1e-6


class EventKind(Enum):
    SEGMENT_START = "SEGMENT_START"
    WAYPOINT_REACHED = "WAYPOINT_REACHED"
    MORPH_START = "MORPH_START"
    MORPH_END = "MORPH_END"
    PATH_COMPLETE = "PATH_COMPLETE"


@dataclass
class RobotState:
    """Simulated robot pose and bookkeeping; mode is "G", "A", or "M" mid-morph."""

    x: float
    y: float
    z: float
    theta: float
    mode: str
    morph_remaining: float = 0.0
    odometer: float = 0.0
    clock: float = 0.0
    energy_spent: float = 0.0


@dataclass(frozen=True)
class TraceEvent:
    t: float
    kind: EventKind
    state: RobotState


@dataclass(frozen=True)
class ExecutorParams:
    """Controller gains and capture/stall settings.

    waypoint_tolerance is the capture radius; scenario runs default it to
    one grid cell. Wheelbase and wheel radius only matter for the wheel
    command mapping.
    """

    k_v: float = 1.0
    k_omega: float = 2.0
    omega_max: float = math.pi
    waypoint_tolerance: float = 0.1
    stall_timeout: float = 10.0
    wheelbase: float = 0.4
    wheel_radius: float = 0.1


class ExecutionStalledError(RuntimeError):
    """The follower made no progress for stall_timeout seconds of sim time."""

    def __init__(self, message: str, trace: List[TraceEvent]):
        super().__init__(message)
        self.trace = trace


def wrap_angle(angle: float) -> float:
    """Wrap to (-pi, pi]."""
    return math.atan2(math.sin(angle), math.cos(angle))


def diff_drive_control(state: RobotState, target: Tuple[float, float],
                       params: ExecutorParams = ExecutorParams(),
                       v_max: float = 1.0) -> Tuple[float, float]:
    """P-control law for the differential drive.

    Angular rate is proportional to the wrapped heading error; forward speed
    is proportional to the remaining distance, saturated at v_max, and held
    at zero until the heading error drops below pi/2.
    """
    dx = target[0] - state.x
    dy = target[1] - state.y
    distance = math.hypot(dx, dy)
    if distance == 0.0:
        return (0.0, 0.0)
    error = wrap_angle(math.atan2(dy, dx) - state.theta)
    omega = max(-params.omega_max, min(params.omega_max, params.k_omega * error))
    if abs(error) >= math.pi / 2.0:
        return (0.0, omega)
    v = min(v_max, params.k_v * distance)
    return (v, omega)


def wheel_commands(v: float, omega: float, wheelbase: float,
                   wheel_radius: float) -> Tuple[float, float]:
    """Map unicycle commands (v, omega) to left/right wheel speeds."""
    u_left = (v - omega * wheelbase / 2.0) / wheel_radius
    u_right = (v + omega * wheelbase / 2.0) / wheel_radius
    return (u_left, u_right)


def execute(path: ModalPath, model: EnergyModel = EnergyModel(),
            dt: float = 0.02,
            params: ExecutorParams = ExecutorParams()) -> List[TraceEvent]:
    """Simulate traversal of the path; returns the event trace.

    The robot starts at the first waypoint facing the second. Each flag
    change dwells in place for exactly the morph time and adds the morph
    energy; waypoints count as reached inside waypoint_tolerance. Raises
    ExecutionStalledError (with the partial trace attached) when a follower
    stops making progress.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    waypoints = path.waypoints
    if not waypoints:
        raise ValueError("cannot execute an empty path")

    first = waypoints[0]
    theta0 = 0.0
    if len(waypoints) > 1:
        theta0 = math.atan2(waypoints[1].y - first.y, waypoints[1].x - first.x)
    state = RobotState(first.x, first.y, first.z, theta0, first.flag.value)
    trace: List[TraceEvent] = []

    def emit(kind: EventKind) -> None:
        trace.append(TraceEvent(state.clock, kind, replace(state)))

    emit(EventKind.SEGMENT_START)
    for target in waypoints[1:]:
        if target.flag.value != state.mode:
            _morph(state, target.flag, model, emit)
        if state.mode == LocomotionMode.GROUND.value:
            _follow_ground(state, target, model, dt, params, emit, trace)
        else:
            _follow_aerial(state, target, model, dt, params, emit, trace)
        emit(EventKind.WAYPOINT_REACHED)
    emit(EventKind.PATH_COMPLETE)
    return trace


def _morph(state: RobotState, new_flag: LocomotionMode, model: EnergyModel,
           emit) -> None:
    state.mode = MODE_MORPHING
    state.morph_remaining = model.morph_time
    emit(EventKind.MORPH_START)
    state.clock += model.morph_time
    state.energy_spent += morph_cost(model)
    state.morph_remaining = 0.0
    state.mode = new_flag.value
    emit(EventKind.MORPH_END)
    emit(EventKind.SEGMENT_START)


def _follow_ground(state: RobotState, target: ModalWaypoint, model: EnergyModel,
                   dt: float, params: ExecutorParams, emit, trace) -> None:
    start_z = state.z
    start_dist = math.hypot(target.x - state.x, target.y - state.y)
    best = math.inf
    last_progress = state.clock
    while True:
        dist = math.hypot(target.x - state.x, target.y - state.y)
        if dist <= params.waypoint_tolerance:
            state.z = target.z
            return
        if dist < best - _PROGRESS_EPS:
            best = dist
            last_progress = state.clock
        elif state.clock - last_progress > params.stall_timeout:
            raise ExecutionStalledError(
                f"ground follower stalled {dist:.3f} m from waypoint", trace)
        v, omega = diff_drive_control(state, (target.x, target.y), params,
                                      v_max=model.drive_speed)
        state.x += v * math.cos(state.theta) * dt
        state.y += v * math.sin(state.theta) * dt
        state.theta = wrap_angle(state.theta + omega * dt)
        if start_dist > 0.0:
            frac = max(0.0, min(1.0, 1.0 - dist / start_dist))
            state.z = start_z + frac * (target.z - start_z)
        if v > 0.0:
            state.energy_spent += model.drive_power * dt
            state.odometer += v * dt
        state.clock += dt


def _follow_aerial(state: RobotState, target: ModalWaypoint, model: EnergyModel,
                   dt: float, params: ExecutorParams, emit, trace) -> None:
    best = math.inf
    last_progress = state.clock
    while True:
        dx = target.x - state.x
        dy = target.y - state.y
        dz = target.z - state.z
        dist = math.sqrt(dx * dx + dy * dy + dz * dz)
        if dist <= params.waypoint_tolerance:
            return
        if dist < best - _PROGRESS_EPS:
            best = dist
            last_progress = state.clock
        elif state.clock - last_progress > params.stall_timeout:
            raise ExecutionStalledError(
                f"aerial follower stalled {dist:.3f} m from waypoint", trace)
        step = min(model.fly_speed * dt, dist)
        state.x += dx / dist * step
        state.y += dy / dist * step
        state.z += dz / dist * step
        if dx or dy:
            state.theta = math.atan2(dy, dx)
        state.energy_spent += model.fly_power * dt
        state.odometer += step
        state.clock += dt
