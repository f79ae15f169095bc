"""Deterministic discrete-time unicycle simulation.

The execution layer reproduces the gap between commanded and executed
velocities: commands from the non-window-aware laws are projected onto the
currently reachable velocity window (``hardware_clip``), while dynamic-window
commands are feasible by construction and execute unchanged.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .controllers import (
    ControllerKind,
    KinodynamicLimits,
    LookaheadConfig,
    RegulationConfig,
    VelocityCommand,
    compute_command,
    compute_dynamic_window,
)
from .errors import ParameterError, SimulationDivergedError
from .paths import Pose2D, ReferencePath, RobotState

HARDWARE_CLIP = "hardware_clip"
PASS_THROUGH = "pass_through"

# Commands are flagged as violations only beyond this absolute slack.
_VIOLATION_TOL = 1e-9


@dataclass(frozen=True)
class ExecutionModel:
    """How commanded velocities turn into executed ones."""

    mode: str = HARDWARE_CLIP
    limits: KinodynamicLimits = KinodynamicLimits()

    def __post_init__(self) -> None:
        if self.mode not in (HARDWARE_CLIP, PASS_THROUGH):
            raise ParameterError(f"mode must be '{HARDWARE_CLIP}' or '{PASS_THROUGH}'")


@dataclass(frozen=True)
class NoiseModel:
    """Optional seeded disturbances; all-zero sigmas give a deterministic run.

    ``sigma_pose_init`` perturbs the initial x/y (meters) and heading
    (radians). ``sigma_v``/``sigma_omega`` model actuation noise added to the
    executed command; under ``hardware_clip`` the noisy velocities are
    re-projected onto the reachable window.
    """

    sigma_v: float = 0.0
    sigma_omega: float = 0.0
    sigma_pose_init: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.sigma_v < 0.0 or self.sigma_omega < 0.0 or self.sigma_pose_init < 0.0:
            raise ParameterError("noise sigmas must be non-negative")


@dataclass(frozen=True)
class TrajectoryLog:
    """Column-oriented per-step record of a simulated run.

    Columns: time, pose and state velocities at command time, the raw
    command, the executed velocities, and the four violation flags (raw
    command vs. the velocity / acceleration limits).
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    v: np.ndarray
    omega: np.ndarray
    v_cmd: np.ndarray
    omega_cmd: np.ndarray
    v_exec: np.ndarray
    omega_exec: np.ndarray
    viol_v: np.ndarray
    viol_w: np.ndarray
    viol_a: np.ndarray
    viol_alpha: np.ndarray

    _COLUMNS = (
        "t", "x", "y", "theta", "v", "omega", "v_cmd", "omega_cmd",
        "v_exec", "omega_exec", "viol_v", "viol_w", "viol_a", "viol_alpha",
    )

    def __post_init__(self) -> None:
        size = self.t.size
        for name in self._COLUMNS:
            column = getattr(self, name)
            if column.size != size:
                raise ParameterError("log columns must have equal length")
            column.setflags(write=False)

    def __len__(self) -> int:
        return int(self.t.size)

    @property
    def any_violation(self) -> np.ndarray:
        """Per-step flag: the raw command violated at least one limit."""
        return self.viol_v | self.viol_w | self.viol_a | self.viol_alpha

    def to_csv(self, file: str | Path) -> None:
        with open(file, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(self._COLUMNS)
            for row in zip(*(getattr(self, name) for name in self._COLUMNS)):
                writer.writerow(
                    [int(value) if isinstance(value, np.bool_) else repr(float(value)) for value in row]
                )

    @classmethod
    def from_csv(cls, file: str | Path) -> "TrajectoryLog":
        with open(file, newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header is None or tuple(header) != cls._COLUMNS:
                raise ParameterError(f"{file}: unexpected trajectory CSV header")
            rows = [row for row in reader if row]
        columns = list(zip(*rows)) if rows else [[] for _ in cls._COLUMNS]
        arrays = {}
        for name, column in zip(cls._COLUMNS, columns):
            if name.startswith("viol_"):
                arrays[name] = np.array([bool(int(value)) for value in column])
            else:
                arrays[name] = np.array([float(value) for value in column])
        return cls(**arrays)


@dataclass(frozen=True)
class ScenarioResult:
    """Outcome of one simulated tracking run."""

    log: TrajectoryLog
    reached_goal: bool
    travel_time: float


def clip_to_feasible(
    command: VelocityCommand, state: RobotState, limits: KinodynamicLimits
) -> VelocityCommand:
    """Project a command onto the current dynamic window, one axis at a time."""
    window = compute_dynamic_window(state, limits)
    return VelocityCommand(
        min(max(command.v, window.v_lo), window.v_hi),
        min(max(command.omega, window.omega_lo), window.omega_hi),
    )


def step_unicycle(state: RobotState, executed: VelocityCommand, dt: float) -> RobotState:
    """Advance the pose along the exact constant-velocity arc for ``dt`` seconds."""
    if dt <= 0.0:
        raise ParameterError("dt must be positive")
    v, omega = executed.v, executed.omega
    theta = state.pose.theta
    if abs(omega) > 1e-9:
        radius = v / omega
        x = state.pose.x + radius * (math.sin(theta + omega * dt) - math.sin(theta))
        y = state.pose.y - radius * (math.cos(theta + omega * dt) - math.cos(theta))
    else:
        x = state.pose.x + v * math.cos(theta) * dt
        y = state.pose.y + v * math.sin(theta) * dt
    return RobotState(Pose2D(x, y, theta + omega * dt), v, omega)


def _violation_flags(
    command: VelocityCommand, state: RobotState, limits: KinodynamicLimits
) -> tuple[bool, bool, bool, bool]:
    dt = limits.dt
    viol_v = (
        command.v > limits.v_max + _VIOLATION_TOL or command.v < limits.v_min - _VIOLATION_TOL
    )
    viol_w = (
        command.omega > limits.omega_max + _VIOLATION_TOL
        or command.omega < limits.omega_min - _VIOLATION_TOL
    )
    viol_a = (
        command.v > state.v + limits.accel_max * dt + _VIOLATION_TOL
        or command.v < state.v - limits.decel_max * dt - _VIOLATION_TOL
    )
    viol_alpha = (
        command.omega > state.omega + limits.ang_accel_max * dt + _VIOLATION_TOL
        or command.omega < state.omega - limits.ang_decel_max * dt - _VIOLATION_TOL
    )
    return viol_v, viol_w, viol_a, viol_alpha


def initial_state_on_path(
    path: ReferencePath, noise: NoiseModel | None = None, rng: np.random.Generator | None = None
) -> RobotState:
    """Rest state at the first waypoint, heading along the first segment."""
    first, second = path.waypoints[0], path.waypoints[1]
    x, y = float(first[0]), float(first[1])
    theta = math.atan2(float(second[1] - first[1]), float(second[0] - first[0]))
    if noise is not None and noise.sigma_pose_init > 0.0:
        if rng is None:
            rng = np.random.default_rng(noise.seed)
        sigma = noise.sigma_pose_init
        x += rng.normal(0.0, sigma)
        y += rng.normal(0.0, sigma)
        theta += rng.normal(0.0, sigma)
    return RobotState(Pose2D(x, y, theta), 0.0, 0.0)


def run_scenario(
    path: ReferencePath,
    kind: ControllerKind,
    limits: KinodynamicLimits,
    lookahead: LookaheadConfig,
    regulation: RegulationConfig,
    execution: ExecutionModel | None = None,
    noise: NoiseModel | None = None,
    *,
    obstacle_distance: float = math.inf,
    max_time: float = 60.0,
    goal_tolerance: float = 0.15,
    initial_state: RobotState | None = None,
) -> ScenarioResult:
    """Run one tracking scenario until the goal is reached or time runs out.

    Per step: compute the command, record violation flags against ``limits``,
    pass the command through the execution layer, then integrate. The run
    ends as soon as the robot is within ``goal_tolerance`` of the final
    waypoint. Identical inputs (including the noise seed) reproduce the log
    bit for bit.
    """
    if max_time <= 0.0:
        raise ParameterError("max_time must be positive")
    if goal_tolerance < 0.0:
        raise ParameterError("goal_tolerance must be non-negative")
    if obstacle_distance < 0.0:
        raise ParameterError("obstacle_distance must be non-negative")
    if execution is None:
        execution = ExecutionModel(limits=limits)
    if noise is None:
        noise = NoiseModel()
    rng = np.random.default_rng(noise.seed)
    state = initial_state if initial_state is not None else initial_state_on_path(path, noise, rng)
    velocity_noise = noise.sigma_v > 0.0 or noise.sigma_omega > 0.0

    goal_x, goal_y = float(path.goal[0]), float(path.goal[1])
    dt = limits.dt
    total_steps = int(round(max_time / dt))
    rows: list[tuple] = []
    reached = False
    for step in range(total_steps):
        if math.hypot(state.pose.x - goal_x, state.pose.y - goal_y) <= goal_tolerance:
            reached = True
            break
        try:
            command = compute_command(
                kind, state, path, limits, lookahead, regulation, obstacle_distance
            )
            flags = _violation_flags(command, state, limits)
            if execution.mode == HARDWARE_CLIP and kind is not ControllerKind.DYNAMIC_WINDOW:
                executed = clip_to_feasible(command, state, execution.limits)
            else:
                executed = command
            if velocity_noise:
                executed = VelocityCommand(
                    executed.v + (rng.normal(0.0, noise.sigma_v) if noise.sigma_v > 0.0 else 0.0),
                    executed.omega
                    + (rng.normal(0.0, noise.sigma_omega) if noise.sigma_omega > 0.0 else 0.0),
                )
                if execution.mode == HARDWARE_CLIP:
                    executed = clip_to_feasible(executed, state, execution.limits)
            rows.append(
                (
                    step * dt,
                    state.pose.x, state.pose.y, state.pose.theta, state.v, state.omega,
                    command.v, command.omega, executed.v, executed.omega, *flags,
                )
            )
            state = step_unicycle(state, executed, dt)
        except ParameterError as exc:
            raise SimulationDivergedError(f"non-finite state at step {step}") from exc

    columns = list(zip(*rows)) if rows else [[] for _ in TrajectoryLog._COLUMNS]
    log = TrajectoryLog(
        **{
            name: np.array(column, dtype=bool if name.startswith("viol_") else float)
            for name, column in zip(TrajectoryLog._COLUMNS, columns)
        }
    )
    return ScenarioResult(log, reached, len(log) * dt)
