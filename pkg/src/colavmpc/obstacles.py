"""Scripted obstacle motion and a synthetic noisy tracker.

Ground truth follows piecewise constant-velocity scripts. Estimates
emulate a radar tracking pipeline: delayed by a latency, refreshed on
a fixed period, and perturbed by independent Gaussian noise per field.
Predictions extrapolate an estimate at constant speed and course.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import TimeGrid, wrap_angle
from .objective import ObstaclePrediction


@dataclass(frozen=True)
class ScriptEvent:
    """Timed change of course and/or speed."""

    t: float
    sog: float | None = None
    course: float | None = None


@dataclass(frozen=True)
class ObstacleScript:
    id: str
    north: float
    east: float
    sog: float
    course: float
    events: tuple[ScriptEvent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.sog < 0.0:
            raise ValueError("sog must be >= 0")
        ts = [ev.t for ev in self.events]
        if any(t < 0 for t in ts) or ts != sorted(ts):
            raise ValueError("events must be sorted with t >= 0")


@dataclass(frozen=True)
class EstimateNoise:
    pos_std: float = 0.0
    sog_std: float = 0.0
    course_std: float = 0.0
    latency: float = 0.0
    period: float = 2.5
    seed: int | None = None

    def __post_init__(self):
        if min(self.pos_std, self.sog_std, self.course_std, self.latency) < 0.0:
            raise ValueError("noise parameters must be >= 0")
        if self.period <= 0.0:
            raise ValueError("update period must be > 0")


NOISE_PRESETS = {
    "radar": EstimateNoise(
        pos_std=10.0, sog_std=0.3, course_std=math.radians(15.0), latency=2.5, period=2.5
    ),
    "ais": EstimateNoise(period=10.0),
    "none": EstimateNoise(period=2.5),
}


@dataclass(frozen=True)
class ObstacleEstimate:
    id: str
    north: float
    east: float
    sog: float
    course: float
    timestamp: float


def ground_truth(script: ObstacleScript, t: float) -> tuple[float, float, float, float]:
    """True (north, east, sog, course) at time t >= 0."""
    if t < 0.0:
        raise ValueError("t must be >= 0")
    north, east = script.north, script.east
    sog, course = script.sog, script.course
    t_prev = 0.0
    for ev in script.events:
        if ev.t > t:
            break
        dt = ev.t - t_prev
        north += sog * math.cos(course) * dt
        east += sog * math.sin(course) * dt
        t_prev = ev.t
        if ev.sog is not None:
            sog = ev.sog
        if ev.course is not None:
            course = ev.course
    dt = t - t_prev
    north += sog * math.cos(course) * dt
    east += sog * math.sin(course) * dt
    return north, east, sog, wrap_angle(course)


def observe(
    script: ObstacleScript, noise: EstimateNoise, t: float, rng: np.random.Generator
) -> ObstacleEstimate:
    """Noisy estimate of the script at time t.

    The underlying truth is sampled one latency in the past (clamped at
    the scenario start); position, speed and course get independent
    zero-mean Gaussian perturbations. Deterministic for a given rng
    state.
    """
    t_data = max(t - noise.latency, 0.0)
    north, east, sog, course = ground_truth(script, t_data)
    north += noise.pos_std * rng.standard_normal()
    east += noise.pos_std * rng.standard_normal()
    sog = max(sog + noise.sog_std * rng.standard_normal(), 0.0)
    course = wrap_angle(course + noise.course_std * rng.standard_normal())
    return ObstacleEstimate(
        id=script.id, north=north, east=east, sog=sog, course=course, timestamp=t_data
    )


def predict_obstacle(
    est: ObstacleEstimate, grid: TimeGrid, weight: float = 1.0
) -> ObstaclePrediction:
    """Constant-velocity extrapolation of an estimate onto a grid."""
    if grid.t0 < est.timestamp - 1e-9:
        raise ValueError("prediction grid starts before the estimate timestamp")
    dt_rel = grid.times() - est.timestamp
    return ObstaclePrediction(
        grid=grid,
        north=est.north + est.sog * math.cos(est.course) * dt_rel,
        east=est.east + est.sog * math.sin(est.course) * dt_rel,
        course=est.course,
        sog=est.sog,
        weight=weight,
    )
