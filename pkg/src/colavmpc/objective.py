"""Trajectory scoring: alignment, obstacle avoidance, transitional cost.

Obstacle penalties live on nested collision/safety/margin regions.
Regions are either circles or a COLREGs-aware shape stitched from
three ellipses and a circle, larger ahead of the obstacle and extended
on its starboard side. The relative bearing used throughout locates
the OWNSHIP in the obstacle's frame: 0 dead ahead of the obstacle,
+pi/2 on its starboard beam.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PoseTrajectory, TimeGrid, VelocityTrajectory, resample, wrap_angle
from .guidance import DesiredTrajectory
from .tree import CandidateTrajectory

TRAN_TOL = 1e-6


@dataclass(frozen=True)
class PenaltyGeometry:
    """Collision (k=0), safety (k=1) and margin (k=2) region parameters.

    circular: radii[k] are plain radii. elliptical_colregs: a[k]/b[k]
    are the fore major and aft/port minor axes; the starboard minor
    axis is b[k] + d_colregs. gamma1 sets the penalty level at the
    safety boundary.
    """

    kind: str
    gamma1: float
    radii: tuple[float, float, float] | None = None
    a: tuple[float, float, float] | None = None
    b: tuple[float, float, float] | None = None
    d_colregs: float | None = None

    def __post_init__(self):
        if not 0.0 < self.gamma1 < 1.0:
            raise ValueError("gamma1 must be in (0, 1)")
        if self.kind == "circular":
            if self.radii is None:
                raise ValueError("circular geometry needs radii")
            d0, d1, d2 = self.radii
            if not 0.0 < d0 < d1 < d2:
                raise ValueError("radii must satisfy 0 < D0 < D1 < D2")
        elif self.kind == "elliptical_colregs":
            if self.a is None or self.b is None or self.d_colregs is None:
                raise ValueError("elliptical geometry needs a, b and d_colregs")
            if self.d_colregs <= 0.0:
                raise ValueError("d_colregs must be > 0")
            for k in range(3):
                if not 0.0 < self.b[k] < self.a[k]:
                    raise ValueError("each region needs 0 < b_k < a_k")
            if not (self.a[0] < self.a[1] < self.a[2] and self.b[0] < self.b[1] < self.b[2]):
                raise ValueError("regions must be strictly nested")
        else:
            raise ValueError(f"unknown penalty kind {self.kind!r}")

    @staticmethod
    def circular(radii, gamma1: float) -> "PenaltyGeometry":
        return PenaltyGeometry(kind="circular", gamma1=gamma1, radii=tuple(radii))

    @staticmethod
    def elliptical(a, b, d_colregs: float, gamma1: float) -> "PenaltyGeometry":
        return PenaltyGeometry(
            kind="elliptical_colregs", gamma1=gamma1, a=tuple(a), b=tuple(b), d_colregs=d_colregs
        )


@dataclass(frozen=True)
class ObjectiveWeights:
    w_align: float
    w_avoid: float
    w_tran: float
    w_course: float
    w_pos: float = 1.0

    def __post_init__(self):
        if min(self.w_align, self.w_avoid, self.w_tran) < 0.0:
            raise ValueError("term weights must be >= 0")
        if self.w_course <= 0.0 or self.w_pos <= 0.0:
            raise ValueError("w_course and w_pos must be > 0")


@dataclass(frozen=True)
class ObstaclePrediction:
    """Constant-velocity obstacle track on a grid."""

    grid: TimeGrid
    north: np.ndarray
    east: np.ndarray
    course: float
    sog: float
    weight: float = 1.0

    def __post_init__(self):
        for name in ("north", "east"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.grid.n,):
                raise ValueError(f"{name} must have length grid.n")
            object.__setattr__(self, name, arr)

    def at(self, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Positions at arbitrary times (linear interp is exact here)."""
        ts = self.grid.times()
        tol = 1e-9
        if np.min(times) < ts[0] - tol or np.max(times) > ts[-1] + tol:
            raise ValueError("obstacle prediction does not cover the horizon")
        return np.interp(times, ts, self.north), np.interp(times, ts, self.east)


def _ellipse_radius(a, b, beta):
    """Polar radius of an axis-aligned ellipse (major a along beta=0)."""
    return a * b / np.sqrt((b * np.cos(beta)) ** 2 + (a * np.sin(beta)) ** 2)


def region_radius(geom: PenaltyGeometry, k: int, beta):
    """Region boundary distance at relative bearing beta; accepts arrays."""
    if k not in (0, 1, 2):
        raise ValueError("k must be 0, 1 or 2")
    beta = np.asarray(beta, dtype=float)
    if geom.kind == "circular":
        out = np.full(beta.shape, geom.radii[k])
        return float(out) if out.ndim == 0 else out
    a, b = geom.a[k], geom.b[k]
    c = b + geom.d_colregs
    out = np.where(
        beta < -np.pi / 2,
        b,
        np.where(
            beta < 0.0,
            _ellipse_radius(a, b, beta),
            np.where(beta < np.pi / 2, _ellipse_radius(a, c, beta), _ellipse_radius(b, c, beta)),
        ),
    )
    return float(out) if out.ndim == 0 else out


def _outer_penalty(d, d0, d1, d2, gamma1):
    return np.select(
        [d < d0, d < d1, d < d2],
        [
            np.ones_like(d),
            1.0 + (gamma1 - 1.0) / (d1 - d0) * (d - d0),
            gamma1 - gamma1 / (d2 - d1) * (d - d1),
        ],
        0.0,
    )


def _inner_penalty(geom: PenaltyGeometry, d, beta, d0):
    """Extra cost inside the COLREGs collision region.

    The core boundary D0* is the plain fore ellipse / aft circle; the
    cost ramps down with the obstacle-frame lateral distance from that
    boundary, measured along the body y-axis at fixed body x.
    """
    a0, b0 = geom.a[0], geom.b[0]
    d0_star = np.where(np.abs(beta) < np.pi / 2, _ellipse_radius(a0, b0, beta), b0)
    x_body = d * np.cos(beta)
    y_body = d * np.sin(beta)
    y_boundary = np.where(
        x_body >= 0.0,
        b0 * np.sqrt(np.clip(1.0 - (np.minimum(x_body, a0) / a0) ** 2, 0.0, None)),
        np.sqrt(np.clip(b0**2 - x_body**2, 0.0, None)),
    )
    y_off = np.maximum(y_body - y_boundary, 0.0)
    ramp = np.clip(1.0 - y_off / geom.d_colregs, 0.0, 1.0)
    return np.select([d < d0_star, d < d0], [np.ones_like(d), ramp], 0.0)


def penalty(geom: PenaltyGeometry, d, beta):
    """Penalty value at distance d and relative bearing beta; arrays ok."""
    d = np.asarray(d, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any(d < 0.0):
        raise ValueError("distance must be >= 0")
    if geom.kind == "circular":
        d0, d1, d2 = geom.radii
        out = _outer_penalty(d, d0, d1, d2, geom.gamma1)
    else:
        d0 = region_radius(geom, 0, beta)
        d1 = region_radius(geom, 1, beta)
        d2 = region_radius(geom, 2, beta)
        out = _outer_penalty(d, d0, d1, d2, geom.gamma1) + _inner_penalty(geom, d, beta, d0)
    return float(out) if out.ndim == 0 else out


def relative_bearing(own_north, own_east, obs_north, obs_east, obs_course):
    """Bearing of the ownship seen from the obstacle, relative to its course."""
    return wrap_angle(
        np.arctan2(
            np.asarray(own_east) - np.asarray(obs_east),
            np.asarray(own_north) - np.asarray(obs_north),
        )
        - obs_course
    )


def _trapz(values: np.ndarray, dt: float):
    return np.trapezoid(values, dx=dt, axis=-1)


def align_cost(
    pose: PoseTrajectory, dtraj: DesiredTrajectory, w_course: float, w_pos: float = 1.0
) -> float:
    """Time integral of weighted position and course error vs the reference."""
    times = pose.grid.times()
    ref_n, ref_e = dtraj.position(times)
    ref_course = dtraj.course(times)
    err_pos = np.hypot(pose.north - ref_n, pose.east - ref_e)
    err_course = np.abs(wrap_angle(pose.course - ref_course))
    return float(_trapz(w_pos * err_pos + w_course * err_course, pose.grid.dt))


def avoid_cost(
    pose: PoseTrajectory,
    obstacles: list[ObstaclePrediction],
    geom: PenaltyGeometry,
) -> float:
    """Penalty integral summed over obstacles along the pose trajectory."""
    times = pose.grid.times()
    total = 0.0
    for obs in obstacles:
        obs_n, obs_e = obs.at(times)
        d = np.hypot(pose.north - obs_n, pose.east - obs_e)
        beta = relative_bearing(pose.north, pose.east, obs_n, obs_e, obs.course)
        total += obs.weight * float(_trapz(penalty(geom, d, beta), pose.grid.dt))
    return total


def tran_deviation(
    candidate_first: VelocityTrajectory, previous_first: VelocityTrajectory
) -> tuple[float, float]:
    """Integrated |SOG| and |course| deviation from the previous reference."""
    prev = previous_first
    if (
        abs(prev.grid.t0 - candidate_first.grid.t0) > 1e-9
        or prev.grid.n != candidate_first.grid.n
        or abs(prev.grid.dt - candidate_first.grid.dt) > 1e-9
    ):
        prev = resample(previous_first, candidate_first.grid)
    dt = candidate_first.grid.dt
    e_sog = float(_trapz(np.abs(candidate_first.sog - prev.sog), dt))
    e_course = float(_trapz(np.abs(wrap_angle(candidate_first.course - prev.course)), dt))
    return e_sog, e_course


def tran_cost(
    candidates_first: list[VelocityTrajectory],
    previous_first: VelocityTrajectory,
    tol: float = TRAN_TOL,
) -> np.ndarray:
    """Binary transitional scores: 0 only for the candidates closest (in
    both channels) to the previously committed first maneuver."""
    devs = np.array([tran_deviation(c, previous_first) for c in candidates_first])
    e_min = devs.min(axis=0)
    keep = (devs[:, 0] <= e_min[0] + tol) & (devs[:, 1] <= e_min[1] + tol)
    return np.where(keep, 0.0, 1.0)


@dataclass(frozen=True)
class CostTable:
    align: np.ndarray
    avoid: np.ndarray
    tran: np.ndarray
    total: np.ndarray
    selected: int


def _pose_on_eval_grid(pose: PoseTrajectory, eval_dt: float | None) -> PoseTrajectory:
    if eval_dt is None:
        return pose
    ratio = eval_dt / pose.grid.dt
    stride = int(round(ratio))
    if abs(ratio - stride) > 1e-9 or stride < 1 or (pose.grid.n - 1) % stride != 0:
        raise ValueError("eval_dt must be an integer multiple of the trajectory dt")
    grid = TimeGrid(pose.grid.t0, eval_dt, (pose.grid.n - 1) // stride + 1)
    return PoseTrajectory(
        grid=grid,
        north=pose.north[::stride],
        east=pose.east[::stride],
        course=pose.course[::stride],
    )


def _velocity_on_eval_grid(traj: VelocityTrajectory, eval_dt: float | None) -> VelocityTrajectory:
    if eval_dt is None:
        return traj
    ratio = eval_dt / traj.grid.dt
    stride = int(round(ratio))
    if abs(ratio - stride) > 1e-9 or stride < 1 or (traj.grid.n - 1) % stride != 0:
        raise ValueError("eval_dt must be an integer multiple of the trajectory dt")
    grid = TimeGrid(traj.grid.t0, eval_dt, (traj.grid.n - 1) // stride + 1)
    return VelocityTrajectory(
        grid=grid,
        sog=traj.sog[::stride],
        rot=traj.rot[::stride],
        course=traj.course[::stride],
        sog_acc=traj.sog_acc[::stride],
        rot_acc=traj.rot_acc[::stride],
    )


def evaluate_costs(
    candidates: list[CandidateTrajectory],
    dtraj: DesiredTrajectory,
    obstacles: list[ObstaclePrediction],
    geom: PenaltyGeometry,
    weights: ObjectiveWeights,
    previous_first: VelocityTrajectory | None,
    eval_dt: float | None = None,
) -> CostTable:
    """Per-candidate cost breakdown and the argmin index.

    Costs are integrated on the evaluation grid (eval_dt strides the
    candidate grids when given). Candidates from one tree share their
    grid, so the terms evaluate as stacked matrices. Ties break toward
    the lowest index.
    """
    if not candidates:
        raise ValueError("empty candidate set")
    poses = [_pose_on_eval_grid(c.predicted_pose, eval_dt) for c in candidates]
    grid = poses[0].grid
    for p in poses[1:]:
        if (p.grid.t0, p.grid.dt, p.grid.n) != (grid.t0, grid.dt, grid.n):
            raise ValueError("candidates must share one evaluation grid")
    times = grid.times()
    cand_n = np.stack([p.north for p in poses])
    cand_e = np.stack([p.east for p in poses])
    cand_chi = np.stack([p.course for p in poses])

    ref_n, ref_e = dtraj.position(times)
    ref_chi = dtraj.course(times)
    align_err = weights.w_pos * np.hypot(cand_n - ref_n, cand_e - ref_e) + (
        weights.w_course * np.abs(wrap_angle(cand_chi - ref_chi))
    )
    align = _trapz(align_err, grid.dt)

    avoid = np.zeros(len(candidates))
    for obs in obstacles:
        obs_n, obs_e = obs.at(times)
        d = np.hypot(cand_n - obs_n, cand_e - obs_e)
        beta = relative_bearing(cand_n, cand_e, obs_n, obs_e, obs.course)
        avoid += obs.weight * _trapz(penalty(geom, d, beta), grid.dt)

    if previous_first is None:
        tran = np.zeros(len(candidates))
    else:
        firsts = [_velocity_on_eval_grid(c.first_maneuver_desired, eval_dt) for c in candidates]
        fgrid = firsts[0].grid
        prev = previous_first
        if (
            abs(prev.grid.t0 - fgrid.t0) > 1e-9
            or prev.grid.n != fgrid.n
            or abs(prev.grid.dt - fgrid.dt) > 1e-9
        ):
            prev = resample(previous_first, fgrid)
        dev_sog = _trapz(np.abs(np.stack([f.sog for f in firsts]) - prev.sog), fgrid.dt)
        dev_chi = _trapz(
            np.abs(wrap_angle(np.stack([f.course for f in firsts]) - prev.course)), fgrid.dt
        )
        keep = (dev_sog <= dev_sog.min() + TRAN_TOL) & (dev_chi <= dev_chi.min() + TRAN_TOL)
        tran = np.where(keep, 0.0, 1.0)
    total = weights.w_align * align + weights.w_avoid * avoid + weights.w_tran * tran
    return CostTable(align=align, avoid=avoid, tran=tran, total=total, selected=int(np.argmin(total)))


def select(
    candidates: list[CandidateTrajectory],
    dtraj: DesiredTrajectory,
    obstacles: list[ObstaclePrediction],
    geom: PenaltyGeometry,
    weights: ObjectiveWeights,
    previous_first: VelocityTrajectory | None,
    eval_dt: float | None = None,
) -> tuple[CandidateTrajectory, CostTable]:
    """Pick the candidate minimizing the weighted objective."""
    table = evaluate_costs(candidates, dtraj, obstacles, geom, weights, previous_first, eval_dt)
    return candidates[table.selected], table


def penalty_field(
    geom: PenaltyGeometry, obstacle_course: float, half_extent: float, cell: float
):
    """Rasterized penalty around an obstacle at the origin.

    Returns (x, y, value) flat arrays: x north offset, y east offset.
    """
    axis = np.arange(-half_extent, half_extent + cell / 2, cell)
    x, y = np.meshgrid(axis, axis, indexing="ij")
    d = np.hypot(x, y)
    beta = relative_bearing(x, y, 0.0, 0.0, obstacle_course)
    value = penalty(geom, d, beta)
    return x.ravel(), y.ravel(), value.ravel()
