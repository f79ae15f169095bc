"""Command-velocity laws for path tracking.

Four variants share the same geometric core (lookahead point and arc
curvature): plain pure pursuit with a fixed lookahead, the adaptive variant
that scales the lookahead with speed, the regulated variant that additionally
caps the linear velocity with curvature/proximity/goal heuristics, and the
dynamic-window variant that selects the command inside the set of velocities
actually reachable in one control period.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import ParameterError
from .paths import (
    ReferencePath,
    RobotState,
    compute_curvature,
    lookahead_from_projection,
    nearest_point_on_path,
)

FIXED_LOOKAHEAD = "fixed"
VELOCITY_SCALED_LOOKAHEAD = "velocity_scaled"

COMBINE_LOWER_BOUND = "lower_bound"
COMBINE_HARD_CAP = "hard_cap"

# Closed-boundary membership tolerance for points on the window edges.
_EDGE_TOL = 1e-9


class ControllerKind(enum.Enum):
    """The four tracking laws the benchmark compares."""

    PURE_PURSUIT = "pp"
    ADAPTIVE = "app"
    REGULATED = "rpp"
    DYNAMIC_WINDOW = "dwpp"

    @classmethod
    def from_name(cls, name: str) -> "ControllerKind":
        for kind in cls:
            if kind.value == name:
                return kind
        valid = ", ".join(kind.value for kind in cls)
        raise ParameterError(f"unknown controller '{name}' (expected one of: {valid})")


@dataclass(frozen=True)
class KinodynamicLimits:
    """Velocity and acceleration envelope plus the control period."""

    v_max: float = 0.5
    v_min: float = 0.0
    omega_max: float = 1.0
    omega_min: float = -1.0
    accel_max: float = 0.5
    decel_max: float = 0.5
    ang_accel_max: float = 1.0
    ang_decel_max: float = 1.0
    dt: float = 0.033

    def __post_init__(self) -> None:
        values = (
            self.v_max, self.v_min, self.omega_max, self.omega_min,
            self.accel_max, self.decel_max, self.ang_accel_max, self.ang_decel_max, self.dt,
        )
        if not all(math.isfinite(value) for value in values):
            raise ParameterError("limits must be finite")
        if self.v_min > self.v_max:
            raise ParameterError("v_min must not exceed v_max")
        if self.omega_min > self.omega_max:
            raise ParameterError("omega_min must not exceed omega_max")
        for name in ("accel_max", "decel_max", "ang_accel_max", "ang_decel_max"):
            if getattr(self, name) <= 0.0:
                raise ParameterError(f"{name} must be positive")
        if self.dt <= 0.0:
            raise ParameterError("dt must be positive")


@dataclass(frozen=True)
class DynamicWindow:
    """Axis-aligned rectangle of feasible (v, omega) pairs for the next step."""

    v_lo: float
    v_hi: float
    omega_lo: float
    omega_hi: float

    def __post_init__(self) -> None:
        if self.v_lo > self.v_hi or self.omega_lo > self.omega_hi:
            raise ParameterError("window bounds must be ordered")

    def contains(self, v: float, omega: float, tol: float = _EDGE_TOL) -> bool:
        return (
            self.v_lo - tol <= v <= self.v_hi + tol
            and self.omega_lo - tol <= omega <= self.omega_hi + tol
        )


@dataclass(frozen=True)
class VelocityCommand:
    """A (linear, angular) velocity pair."""

    v: float
    omega: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.v) and math.isfinite(self.omega)):
            raise ParameterError("command velocities must be finite")


@dataclass(frozen=True)
class LookaheadConfig:
    """How the lookahead distance is chosen.

    ``velocity_scaled`` projects the current speed ``projection_time`` seconds
    ahead and clamps the result to [min_distance, max_distance]; ``fixed``
    always uses ``fixed_distance``.
    """

    mode: str = VELOCITY_SCALED_LOOKAHEAD
    fixed_distance: float = 0.6
    min_distance: float = 0.3
    max_distance: float = 0.7
    projection_time: float = 1.4

    def __post_init__(self) -> None:
        if self.mode not in (FIXED_LOOKAHEAD, VELOCITY_SCALED_LOOKAHEAD):
            raise ParameterError(
                f"mode must be '{FIXED_LOOKAHEAD}' or '{VELOCITY_SCALED_LOOKAHEAD}'"
            )
        if not 0.0 < self.min_distance <= self.max_distance:
            raise ParameterError("need 0 < min_distance <= max_distance")
        if self.projection_time <= 0.0:
            raise ParameterError("projection_time must be positive")
        if self.fixed_distance <= 0.0:
            raise ParameterError("fixed_distance must be positive")


@dataclass(frozen=True)
class RegulationConfig:
    """Linear-velocity regulation heuristics and how they combine.

    ``combination_mode`` selects what the minimum-speed parameters mean:
    ``lower_bound`` (default) applies ``min_regulated_speed`` and
    ``min_approach_speed`` as floors under the scaled velocities, while
    ``hard_cap`` folds them directly into the min() combinations so they act
    as ceilings whenever the corresponding stage is enabled.
    """

    enable_curvature: bool = True
    min_turn_radius: float = 0.9
    enable_proximity: bool = False
    proximity_threshold: float = 1.0
    proximity_gain: float = 0.5
    enable_goal: bool = True
    goal_slowdown_distance: float = 1.0
    min_regulated_speed: float = 0.25
    min_approach_speed: float = 0.05
    combination_mode: str = COMBINE_LOWER_BOUND

    def __post_init__(self) -> None:
        if self.min_turn_radius <= 0.0:
            raise ParameterError("min_turn_radius must be positive")
        if self.proximity_threshold <= 0.0:
            raise ParameterError("proximity_threshold must be positive")
        if not 0.0 < self.proximity_gain <= 1.0:
            raise ParameterError("proximity_gain must be in (0, 1]")
        if self.goal_slowdown_distance <= 0.0:
            raise ParameterError("goal_slowdown_distance must be positive")
        if self.combination_mode not in (COMBINE_LOWER_BOUND, COMBINE_HARD_CAP):
            raise ParameterError(
                f"combination_mode must be '{COMBINE_LOWER_BOUND}' or '{COMBINE_HARD_CAP}'"
            )


@dataclass(frozen=True)
class StabilityConfig:
    """Advisory stability threshold on the lookahead distance."""

    steering_time_constant: float = 0.4
    min_dimensionless_lookahead: float = 2.0

    def __post_init__(self) -> None:
        if self.steering_time_constant <= 0.0:
            raise ParameterError("steering_time_constant must be positive")
        if self.min_dimensionless_lookahead <= 0.0:
            raise ParameterError("min_dimensionless_lookahead must be positive")


def _scaled_lookahead(cfg: LookaheadConfig, v: float) -> float:
    return min(max(v * cfg.projection_time, cfg.min_distance), cfg.max_distance)


def effective_lookahead(cfg: LookaheadConfig, v: float) -> float:
    """Lookahead distance for the current speed under the configured mode."""
    if cfg.mode == FIXED_LOOKAHEAD:
        return cfg.fixed_distance
    return _scaled_lookahead(cfg, v)


def pp_nominal_command(curvature: float, v_des: float) -> VelocityCommand:
    """Nominal command: drive at ``v_des`` along the arc of the given curvature."""
    return VelocityCommand(v_des, curvature * v_des)


def curvature_heuristic(v: float, turn_radius: float, min_radius: float) -> float:
    """Scale the speed down linearly once the turn radius drops to ``min_radius``."""
    if turn_radius > min_radius:
        return v
    return v * turn_radius / min_radius


def proximity_heuristic(v: float, obstacle_distance: float, threshold: float, gain: float) -> float:
    """Scale the speed down when the nearest obstacle is within ``threshold``."""
    if obstacle_distance > threshold:
        return v
    return v * gain * obstacle_distance / threshold


def goal_heuristic(v: float, goal_distance: float, slowdown_distance: float) -> float:
    """Scale the speed down linearly over the final ``slowdown_distance``."""
    if goal_distance > slowdown_distance:
        return v
    return v * goal_distance / slowdown_distance


def regulate_linear_velocity(
    v_cmd: float,
    curvature: float,
    obstacle_distance: float,
    goal_distance: float,
    cfg: RegulationConfig,
) -> float:
    """Apply the enabled speed heuristics to a nominal linear command.

    Curvature and proximity scaling act first, then goal slowdown; disabled
    heuristics impose no cap. The result never exceeds ``v_cmd``.
    """
    turn_radius = math.inf if curvature == 0.0 else 1.0 / abs(curvature)
    v_curv = (
        curvature_heuristic(v_cmd, turn_radius, cfg.min_turn_radius)
        if cfg.enable_curvature
        else math.inf
    )
    v_prox = (
        proximity_heuristic(v_cmd, obstacle_distance, cfg.proximity_threshold, cfg.proximity_gain)
        if cfg.enable_proximity
        else math.inf
    )

    if cfg.combination_mode == COMBINE_HARD_CAP:
        if cfg.enable_curvature or cfg.enable_proximity:
            v_turn = min(v_curv, v_prox, cfg.min_regulated_speed)
        else:
            v_turn = v_cmd
        if cfg.enable_goal:
            v_reg = min(
                goal_heuristic(v_turn, goal_distance, cfg.goal_slowdown_distance),
                cfg.min_approach_speed,
            )
        else:
            v_reg = v_turn
    else:
        v_turn = min(v_cmd, max(min(v_curv, v_prox), cfg.min_regulated_speed))
        if cfg.enable_goal:
            scaled = goal_heuristic(v_turn, goal_distance, cfg.goal_slowdown_distance)
            v_reg = min(v_turn, max(scaled, cfg.min_approach_speed))
        else:
            v_reg = v_turn
    return min(v_cmd, v_reg)


def compute_dynamic_window(state: RobotState, limits: KinodynamicLimits) -> DynamicWindow:
    """Velocities reachable within one control period from the current state."""
    v_hi = min(limits.v_max, state.v + limits.accel_max * limits.dt)
    v_lo = max(limits.v_min, state.v - limits.decel_max * limits.dt)
    omega_hi = min(limits.omega_max, state.omega + limits.ang_accel_max * limits.dt)
    omega_lo = max(limits.omega_min, state.omega - limits.ang_decel_max * limits.dt)
    # A state outside the static limits cannot re-enter them in one step;
    # pin the window to the nearest static bound instead of inverting it.
    if v_lo > v_hi:
        v_lo = v_hi = limits.v_max if state.v > limits.v_max else limits.v_min
    if omega_lo > omega_hi:
        omega_lo = omega_hi = (
            limits.omega_max if state.omega > limits.omega_max else limits.omega_min
        )
    return DynamicWindow(v_lo, v_hi, omega_lo, omega_hi)


def apply_regulation_to_window(window: DynamicWindow, v_reg: float) -> DynamicWindow:
    """Intersect the window's linear range with the admissible range [0, v_reg].

    When the two ranges do not overlap (the regulated ceiling is unreachable
    this step) the linear range collapses to its lower bound: the robot
    brakes as hard as the window allows.
    """
    if v_reg < 0.0:
        raise ParameterError("regulated velocity must be non-negative")
    v_lo = max(window.v_lo, 0.0)
    v_hi = min(window.v_hi, v_reg)
    if v_hi < v_lo:
        v_hi = v_lo
    return DynamicWindow(v_lo, v_hi, window.omega_lo, window.omega_hi)


def distance_point_to_line(v: float, omega: float, curvature: float) -> float:
    """Euclidean distance from (v, omega) to the line omega = curvature * v."""
    return abs(curvature * v - omega) / math.sqrt(curvature * curvature + 1.0)


def optimal_velocity_in_window(window: DynamicWindow, curvature: float) -> VelocityCommand:
    """Feasible velocity closest to the tracking line omega = curvature * v.

    Three cases:

    * zero curvature: take the largest linear velocity; the angular velocity
      is 0 when the window straddles it, otherwise the bound nearer zero.
    * the line crosses the window: of the crossings with the four (extended)
      window edges, take the one with the largest linear velocity. The result
      lies exactly on the line.
    * no crossing: take the window vertex nearest the line; ties prefer the
      larger linear velocity, then the larger |omega|.
    """
    if curvature == 0.0:
        if window.omega_lo <= 0.0 <= window.omega_hi:
            omega = 0.0
        elif abs(window.omega_lo) <= abs(window.omega_hi):
            omega = window.omega_lo
        else:
            omega = window.omega_hi
        return VelocityCommand(window.v_hi, omega)

    crossings = (
        (window.v_lo, curvature * window.v_lo),
        (window.v_hi, curvature * window.v_hi),
        (window.omega_lo / curvature, window.omega_lo),
        (window.omega_hi / curvature, window.omega_hi),
    )
    best = None
    for v, omega in crossings:
        if window.contains(v, omega) and (best is None or v > best[0]):
            best = (v, omega)
    if best is not None:
        # Clamp away any sub-tolerance overhang so the result stays inside
        # the closed window.
        v = min(max(best[0], window.v_lo), window.v_hi)
        omega = min(max(best[1], window.omega_lo), window.omega_hi)
        return VelocityCommand(v, omega)

    vertices = (
        (window.v_lo, window.omega_lo),
        (window.v_lo, window.omega_hi),
        (window.v_hi, window.omega_lo),
        (window.v_hi, window.omega_hi),
    )
    v, omega = min(
        vertices,
        key=lambda p: (distance_point_to_line(p[0], p[1], curvature), -p[0], -abs(p[1])),
    )
    return VelocityCommand(v, omega)


def min_stable_lookahead(v: float, cfg: StabilityConfig) -> float:
    """Smallest lookahead distance the stability advisory accepts at speed ``v``."""
    return v * cfg.steering_time_constant * cfg.min_dimensionless_lookahead


def compute_command(
    kind: ControllerKind,
    state: RobotState,
    path: ReferencePath,
    limits: KinodynamicLimits,
    lookahead_cfg: LookaheadConfig,
    regulation_cfg: RegulationConfig,
    obstacle_distance: float = math.inf,
) -> VelocityCommand:
    """One control step of the selected tracking law.

    Plain pure pursuit always uses the fixed lookahead distance and the
    adaptive variant always scales it with speed; the regulated and
    dynamic-window variants honor ``lookahead_cfg.mode``. The nominal linear
    command is ``limits.v_max``. Only the dynamic-window variant guarantees
    its output is reachable within one control period; the other laws may
    command velocities the execution layer has to clip.
    """
    projection = nearest_point_on_path(path, state.pose)
    if kind is ControllerKind.PURE_PURSUIT:
        lookahead = lookahead_cfg.fixed_distance
    elif kind is ControllerKind.ADAPTIVE:
        lookahead = _scaled_lookahead(lookahead_cfg, state.v)
    else:
        lookahead = effective_lookahead(lookahead_cfg, state.v)
    target = lookahead_from_projection(path, projection, lookahead)
    curvature = compute_curvature(state.pose, target)
    v_des = limits.v_max
    if kind in (ControllerKind.PURE_PURSUIT, ControllerKind.ADAPTIVE):
        return pp_nominal_command(curvature, v_des)

    goal_distance = max(0.0, path.length - projection.arc_length)
    v_reg = regulate_linear_velocity(v_des, curvature, obstacle_distance, goal_distance, regulation_cfg)
    if kind is ControllerKind.REGULATED:
        return pp_nominal_command(curvature, v_reg)

    window = apply_regulation_to_window(compute_dynamic_window(state, limits), v_reg)
    return optimal_velocity_in_window(window, curvature)
