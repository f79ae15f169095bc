"""Evaluation metrics over trajectory logs and multi-trial aggregation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import ParameterError
from .paths import ReferencePath, polyline_distances
from .simulator import ScenarioResult, TrajectoryLog


class MeanSD(NamedTuple):
    mean: float
    sd: float


@dataclass(frozen=True)
class ScenarioMetrics:
    """The four per-run metrics plus whether the goal was reached."""

    violation_ratio: float
    mean_cte: float
    max_cte: float
    travel_time: float
    reached_goal: bool


@dataclass(frozen=True)
class AggregateMetrics:
    """Mean and sample standard deviation of each metric over trials."""

    trial_count: int
    reached_count: int
    violation_ratio: MeanSD
    mean_cte: MeanSD
    max_cte: MeanSD
    travel_time: MeanSD


def violation_ratio(log: TrajectoryLog) -> float:
    """Percentage of steps whose raw command violated any limit."""
    if len(log) == 0:
        raise ParameterError("cannot compute metrics over an empty log")
    return 100.0 * float(np.count_nonzero(log.any_violation)) / len(log)


def cross_track_stats(log: TrajectoryLog, path: ReferencePath) -> tuple[float, float]:
    """(mean, max) lateral deviation over all logged poses."""
    if len(log) == 0:
        raise ParameterError("cannot compute metrics over an empty log")
    distances = polyline_distances(path, np.column_stack((log.x, log.y)))
    return float(distances.mean()), float(distances.max())


def scenario_metrics(result: ScenarioResult, path: ReferencePath) -> ScenarioMetrics:
    """Assemble all four metrics for one run."""
    mean_cte, max_cte = cross_track_stats(result.log, path)
    return ScenarioMetrics(
        violation_ratio=violation_ratio(result.log),
        mean_cte=mean_cte,
        max_cte=max_cte,
        travel_time=result.travel_time,
        reached_goal=result.reached_goal,
    )


def _mean_sd(values: Sequence[float]) -> MeanSD:
    arr = np.asarray(values, dtype=float)
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return MeanSD(float(arr.mean()), sd)


def aggregate(trials: Sequence[ScenarioMetrics]) -> AggregateMetrics:
    """Mean and sample SD (n-1 denominator; 0 for a single trial) per metric."""
    if not trials:
        raise ParameterError("cannot aggregate an empty trial list")
    return AggregateMetrics(
        trial_count=len(trials),
        reached_count=sum(1 for trial in trials if trial.reached_goal),
        violation_ratio=_mean_sd([trial.violation_ratio for trial in trials]),
        mean_cte=_mean_sd([trial.mean_cte for trial in trials]),
        max_cte=_mean_sd([trial.max_cte for trial in trials]),
        travel_time=_mean_sd([trial.travel_time for trial in trials]),
    )
