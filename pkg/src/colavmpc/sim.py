"""Closed-loop scenario engine.

Steps the plant and controller on the integration clock, the synthetic
tracker on its update period, and the planner on its own period. Each
planner call observes obstacles, predicts them at constant velocity,
grows the maneuver tree seeded from the previously commanded desired
velocity, and hands the selected candidate to the controller. Logs
everything; derives distance/incursion metrics and COLREGs situation
labels from the log.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .core import Pose, TimeGrid, Velocity2, VelocityTrajectory, VesselState, resample, wrap_angle
from .guidance import desired_acceleration, los_targets
from .objective import region_radius, relative_bearing, select
from .obstacles import ground_truth, observe, predict_obstacle
from .tree import generate_tree
from .vessel import control_law, inverse_model, step_plant

SPEED_FLOOR = 0.2  # m/s, below this a vessel is not "moving" for COLREGs
HEAD_ON_COURSE_MARGIN = math.radians(6.0)
HEAD_ON_BEARING_LIMIT = math.radians(22.5)
ABAFT_BEAM = math.radians(112.5)  # 22.5 deg abaft the beam
OBSERVABLE_COURSE = math.radians(15.0)
OBSERVABLE_SOG = 1.0


@dataclass
class ObstacleSeries:
    true_north: np.ndarray
    true_east: np.ndarray
    true_sog: np.ndarray
    true_course: np.ndarray
    est_north: np.ndarray
    est_east: np.ndarray
    est_sog: np.ndarray
    est_course: np.ndarray
    est_time: np.ndarray


@dataclass
class PlannerSeries:
    t: np.ndarray
    candidate: np.ndarray
    n_candidates: np.ndarray
    align: np.ndarray
    avoid: np.ndarray
    tran: np.ndarray
    total: np.ndarray
    failsafe: np.ndarray
    course_change: np.ndarray
    sog_change: np.ndarray


@dataclass
class RunLog:
    name: str
    seed: int
    dt: float
    t: np.ndarray
    own_north: np.ndarray
    own_east: np.ndarray
    own_course: np.ndarray
    own_sog: np.ndarray
    own_rot: np.ndarray
    tau_m: np.ndarray
    tau_delta: np.ndarray
    ref_sog: np.ndarray
    ref_rot: np.ndarray
    ref_course: np.ndarray
    ref_sog_acc: np.ndarray
    ref_rot_acc: np.ndarray
    selected: np.ndarray
    obstacles: dict[str, ObstacleSeries]
    planner: PlannerSeries


@dataclass
class ObstacleMetrics:
    min_distance: float
    min_clearance: float  # min over time of distance minus the collision boundary
    margin_time: float
    safety_time: float
    collision_time: float
    situation: str
    passing_side: str
    passed_ahead: bool
    compliance: str


@dataclass
class Metrics:
    obstacles: dict[str, ObstacleMetrics]
    switch_count: int
    failsafe_count: int
    max_course_change: float
    max_sog_change: float
    observable_maneuvers: int
    planner_calls: int


def classify_situation(ownship: VesselState, obstacle) -> str:
    """COLREGs encounter label from instantaneous geometry.

    obstacle is ((north, east), sog, course). Requires both vessels
    moving and converging, otherwise returns "none". Overtaking is
    checked before head-on and crossing, head-on needs nearly
    reciprocal courses with the obstacle in the forward sector, and
    crossings split by which side the obstacle bears on.
    """
    (obs_n, obs_e), obs_sog, obs_course = obstacle
    own = ownship
    if own.vel.sog <= SPEED_FLOOR or obs_sog <= SPEED_FLOOR:
        return "none"
    dn = obs_n - own.pose.north
    de = obs_e - own.pose.east
    dist = math.hypot(dn, de)
    if dist < 1e-6:
        return "none"
    rel_vn = obs_sog * math.cos(obs_course) - own.vel.sog * math.cos(own.pose.course)
    rel_ve = obs_sog * math.sin(obs_course) - own.vel.sog * math.sin(own.pose.course)
    range_rate = (dn * rel_vn + de * rel_ve) / dist
    if range_rate >= 0.0:
        return "none"
    bearing_of_obstacle = wrap_angle(math.atan2(de, dn) - own.pose.course)
    bearing_of_ownship = wrap_angle(math.atan2(-de, -dn) - obs_course)
    if abs(bearing_of_ownship) > ABAFT_BEAM and own.vel.sog > obs_sog:
        return "overtaking"
    if abs(bearing_of_obstacle) > ABAFT_BEAM and obs_sog > own.vel.sog:
        return "overtaken"
    course_diff = abs(wrap_angle(obs_course - own.pose.course))
    if (
        abs(course_diff - math.pi) <= HEAD_ON_COURSE_MARGIN
        and abs(bearing_of_obstacle) <= HEAD_ON_BEARING_LIMIT
    ):
        return "head_on"
    if bearing_of_obstacle > 0.0:
        return "crossing_give_way"
    return "crossing_stand_on"


def _hold_trajectory(traj: VelocityTrajectory, until: float) -> VelocityTrajectory:
    """Extend a trajectory past its end by holding the final values."""
    if traj.grid.t_end >= until - 1e-9:
        return traj
    extra = int(math.ceil((until - traj.grid.t_end) / traj.grid.dt - 1e-9))
    grid = TimeGrid(traj.grid.t0, traj.grid.dt, traj.grid.n + extra)
    pad = lambda arr, v: np.concatenate([arr, np.full(extra, v)])
    return VelocityTrajectory(
        grid=grid,
        sog=pad(traj.sog, traj.sog[-1]),
        rot=pad(traj.rot, 0.0),
        course=pad(traj.course, traj.course[-1]),
        sog_acc=pad(traj.sog_acc, 0.0),
        rot_acc=pad(traj.rot_acc, 0.0),
    )


def run(config: ScenarioConfig) -> tuple[RunLog, Metrics]:
    """Simulate the scenario; deterministic for a given config and seed."""
    model = config.vessel
    gains = config.make_gains()
    dtraj = config.desired.build()
    dt = config.integration_dt
    n_steps = int(round(config.duration / dt))
    planner_every = int(round(config.planner_period / dt))
    horizon = config.tree.horizon
    rng_seed = config.noise.seed if config.noise.seed is not None else config.seed
    rng = np.random.default_rng(rng_seed)

    state = config.ownship
    tau_applied = np.clip(
        inverse_model(model, state.vel), model.tau_min, model.tau_max
    )
    commanded = VelocityTrajectory.constant(
        TimeGrid.from_span(0.0, config.planner_period, dt),
        state.vel.sog,
        state.pose.course,
    )
    selected_id = -1

    def hook(node_state, node_desired, step):
        targets = los_targets(dtraj, node_state, node_state.time, config.los)
        return desired_acceleration(targets, node_desired, step)

    estimates = {}
    next_obs_t = 0.0

    n_rows = n_steps + 1
    cols = {
        name: np.zeros(n_rows)
        for name in (
            "own_north", "own_east", "own_course", "own_sog", "own_rot",
            "tau_m", "tau_delta",
            "ref_sog", "ref_rot", "ref_course", "ref_sog_acc", "ref_rot_acc",
        )
    }
    selected_col = np.zeros(n_rows, dtype=int)
    obs_series = {
        s.id: ObstacleSeries(*(np.zeros(n_rows) for _ in range(9))) for s in config.obstacles
    }
    planner_rows = []

    for step_idx in range(n_steps + 1):
        t = step_idx * dt

        while t >= next_obs_t - 1e-9:
            for script in config.obstacles:
                estimates[script.id] = observe(script, config.noise, t, rng)
            next_obs_t += config.noise.period

        if step_idx % planner_every == 0 and step_idx < n_steps:
            offset = int(round((t - commanded.grid.t0) / dt))
            desired_vel0 = (float(commanded.sog[offset]), float(commanded.course[offset]))
            candidates = generate_tree(
                config.tree, model, config.error_model, state, desired_vel0,
                tau_applied, hook, dt,
            )
            first_grid = TimeGrid.from_span(t, config.tree.step_times[0], config.eval_dt)
            previous_first = resample(commanded, first_grid)
            if not candidates:
                commanded = _hold_trajectory(commanded, t + horizon)
                selected_id = -1
                planner_rows.append(
                    (t, -1, 0, math.nan, math.nan, math.nan, math.nan, True, 0.0, 0.0)
                )
            else:
                pred_grid = TimeGrid.from_span(t, horizon, config.eval_dt)
                predictions = [
                    predict_obstacle(estimates[s.id], pred_grid) for s in config.obstacles
                ]
                best, table = select(
                    candidates, dtraj, predictions, config.geometry, config.weights,
                    previous_first, config.eval_dt,
                )
                commanded = best.desired
                selected_id = best.index
                k = table.selected
                first = best.first_maneuver_desired
                planner_rows.append(
                    (
                        t, best.index, len(candidates),
                        float(table.align[k]), float(table.avoid[k]),
                        float(table.tran[k]), float(table.total[k]), False,
                        float(abs(first.course[-1] - first.course[0])),
                        float(first.sog[-1] - first.sog[0]),
                    )
                )

        offset = int(round((t - commanded.grid.t0) / dt))
        offset = min(offset, commanded.grid.n - 1)
        cols["own_north"][step_idx] = state.pose.north
        cols["own_east"][step_idx] = state.pose.east
        cols["own_course"][step_idx] = state.pose.course
        cols["own_sog"][step_idx] = state.vel.sog
        cols["own_rot"][step_idx] = state.vel.rot
        cols["ref_sog"][step_idx] = commanded.sog[offset]
        cols["ref_rot"][step_idx] = commanded.rot[offset]
        cols["ref_course"][step_idx] = commanded.course[offset]
        cols["ref_sog_acc"][step_idx] = commanded.sog_acc[offset]
        cols["ref_rot_acc"][step_idx] = commanded.rot_acc[offset]
        selected_col[step_idx] = selected_id
        for script in config.obstacles:
            ser = obs_series[script.id]
            tn, te, tsog, tcourse = ground_truth(script, t)
            est = estimates[script.id]
            ser.true_north[step_idx] = tn
            ser.true_east[step_idx] = te
            ser.true_sog[step_idx] = tsog
            ser.true_course[step_idx] = tcourse
            ser.est_north[step_idx] = est.north
            ser.est_east[step_idx] = est.east
            ser.est_sog[step_idx] = est.sog
            ser.est_course[step_idx] = est.course
            ser.est_time[step_idx] = est.timestamp

        if step_idx == n_steps:
            cols["tau_m"][step_idx] = tau_applied[0]
            cols["tau_delta"][step_idx] = tau_applied[1]
            break

        x_d = Velocity2(max(float(commanded.sog[offset]), 0.0), float(commanded.rot[offset]))
        chi_d = float(commanded.course[offset])
        xdot_d = (float(commanded.sog_acc[offset]), float(commanded.rot_acc[offset]))
        tau = control_law(model, gains, state.vel, state.pose.course, x_d, chi_d, xdot_d, dt)
        cols["tau_m"][step_idx] = tau[0]
        cols["tau_delta"][step_idx] = tau[1]
        state = step_plant(model, state, tau, dt)
        tau_applied = tau

    pl = np.array(planner_rows, dtype=float) if planner_rows else np.zeros((0, 10))
    planner = PlannerSeries(
        t=pl[:, 0],
        candidate=pl[:, 1].astype(int),
        n_candidates=pl[:, 2].astype(int),
        align=pl[:, 3],
        avoid=pl[:, 4],
        tran=pl[:, 5],
        total=pl[:, 6],
        failsafe=pl[:, 7].astype(bool),
        course_change=pl[:, 8],
        sog_change=pl[:, 9],
    )
    log = RunLog(
        name=config.name,
        seed=rng_seed,
        dt=dt,
        t=dt * np.arange(n_rows),
        own_north=cols["own_north"],
        own_east=cols["own_east"],
        own_course=cols["own_course"],
        own_sog=cols["own_sog"],
        own_rot=cols["own_rot"],
        tau_m=cols["tau_m"],
        tau_delta=cols["tau_delta"],
        ref_sog=cols["ref_sog"],
        ref_rot=cols["ref_rot"],
        ref_course=cols["ref_course"],
        ref_sog_acc=cols["ref_sog_acc"],
        ref_rot_acc=cols["ref_rot_acc"],
        selected=selected_col,
        obstacles=obs_series,
        planner=planner,
    )
    return log, compute_metrics(log, config.geometry)


def _passing_geometry(log: RunLog, ser: ObstacleSeries, idx: int) -> tuple[str, bool]:
    """Obstacle-frame side ('port'/'starboard') and ahead flag at index idx."""
    dn = log.own_north[idx] - ser.true_north[idx]
    de = log.own_east[idx] - ser.true_east[idx]
    c = math.cos(ser.true_course[idx])
    s = math.sin(ser.true_course[idx])
    x_body = c * dn + s * de
    y_body = -s * dn + c * de
    return ("starboard" if y_body > 0.0 else "port"), bool(x_body > 0.0)


def _compliance(situation: str, side: str, ahead: bool) -> str:
    if situation == "head_on":
        return "compliant" if side == "port" else "noncompliant"
    if situation == "crossing_give_way":
        return "compliant" if not ahead else "aware_noncompliant"
    if situation == "overtaking":
        return "compliant" if side == "port" else "aware_noncompliant"
    return "not_applicable"


def compute_metrics(log: RunLog, geom) -> Metrics:
    obstacles = {}
    for obs_id, ser in log.obstacles.items():
        d = np.hypot(log.own_north - ser.true_north, log.own_east - ser.true_east)
        beta = relative_bearing(
            log.own_north, log.own_east, ser.true_north, ser.true_east, ser.true_course
        )
        d0 = region_radius(geom, 0, beta)
        d1 = region_radius(geom, 1, beta)
        d2 = region_radius(geom, 2, beta)
        margin_time = float(np.count_nonzero(d < d2) * log.dt)
        safety_time = float(np.count_nonzero(d < d1) * log.dt)
        collision_time = float(np.count_nonzero(d < d0) * log.dt)

        situation = "none"
        for idx in range(len(log.t)):
            own = VesselState(
                pose=_pose_at(log, idx), vel=Velocity2(max(log.own_sog[idx], 0.0), log.own_rot[idx]),
                time=float(log.t[idx]),
            )
            label = classify_situation(
                own,
                ((ser.true_north[idx], ser.true_east[idx]), ser.true_sog[idx], ser.true_course[idx]),
            )
            if label != "none":
                situation = label
                break

        cpa = int(np.argmin(d))
        side, ahead = _passing_geometry(log, ser, cpa)
        obstacles[obs_id] = ObstacleMetrics(
            min_distance=float(d.min()),
            min_clearance=float((d - d0).min()),
            margin_time=margin_time,
            safety_time=safety_time,
            collision_time=collision_time,
            situation=situation,
            passing_side=side,
            passed_ahead=ahead,
            compliance=_compliance(situation, side, ahead),
        )

    pl = log.planner
    ok = ~pl.failsafe
    switch_count = int(np.nansum(pl.tran[ok])) if len(pl.t) else 0
    observable = int(
        np.count_nonzero(
            (pl.course_change[ok] > OBSERVABLE_COURSE) | (np.abs(pl.sog_change[ok]) > OBSERVABLE_SOG)
        )
    )
    return Metrics(
        obstacles=obstacles,
        switch_count=switch_count,
        failsafe_count=int(np.count_nonzero(pl.failsafe)),
        max_course_change=float(pl.course_change[ok].max()) if np.any(ok) else 0.0,
        max_sog_change=float(np.abs(pl.sog_change[ok]).max()) if np.any(ok) else 0.0,
        observable_maneuvers=observable,
        planner_calls=len(pl.t),
    )


def _pose_at(log: RunLog, idx: int) -> Pose:
    return Pose(float(log.own_north[idx]), float(log.own_east[idx]), float(log.own_course[idx]))


def runlog_to_csv(log: RunLog) -> str:
    """Fixed-schema CSV, one row per integration step, unit-suffixed headers."""
    headers = [
        "t_s", "own_north_m", "own_east_m", "own_course_rad", "own_sog_mps",
        "own_rot_radps", "tau_m", "tau_delta", "ref_sog_mps", "ref_rot_radps",
        "ref_course_rad", "ref_sog_acc_mps2", "ref_rot_acc_radps2", "selected_candidate",
    ]
    columns = [
        log.t, log.own_north, log.own_east, log.own_course, log.own_sog,
        log.own_rot, log.tau_m, log.tau_delta, log.ref_sog, log.ref_rot,
        log.ref_course, log.ref_sog_acc, log.ref_rot_acc, log.selected,
    ]
    for obs_id in sorted(log.obstacles):
        ser = log.obstacles[obs_id]
        for suffix, arr in (
            ("true_north_m", ser.true_north), ("true_east_m", ser.true_east),
            ("true_sog_mps", ser.true_sog), ("true_course_rad", ser.true_course),
            ("est_north_m", ser.est_north), ("est_east_m", ser.est_east),
            ("est_sog_mps", ser.est_sog), ("est_course_rad", ser.est_course),
            ("est_time_s", ser.est_time),
        ):
            headers.append(f"obs_{obs_id}_{suffix}")
            columns.append(arr)
    buf = io.StringIO()
    buf.write(",".join(headers) + "\n")
    for i in range(len(log.t)):
        buf.write(",".join(_fmt(col[i]) for col in columns) + "\n")
    return buf.getvalue()


def planner_to_csv(log: RunLog) -> str:
    headers = [
        "t_s", "candidate", "n_candidates", "align", "avoid", "tran", "total",
        "failsafe", "course_change_rad", "sog_change_mps",
    ]
    pl = log.planner
    buf = io.StringIO()
    buf.write(",".join(headers) + "\n")
    for i in range(len(pl.t)):
        row = [
            _fmt(pl.t[i]), str(int(pl.candidate[i])), str(int(pl.n_candidates[i])),
            _fmt(pl.align[i]), _fmt(pl.avoid[i]), _fmt(pl.tran[i]), _fmt(pl.total[i]),
            str(int(pl.failsafe[i])), _fmt(pl.course_change[i]), _fmt(pl.sog_change[i]),
        ]
        buf.write(",".join(row) + "\n")
    return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".12g")


def metrics_to_dict(metrics: Metrics) -> dict:
    return {
        "switch_count": metrics.switch_count,
        "failsafe_count": metrics.failsafe_count,
        "planner_calls": metrics.planner_calls,
        "max_course_change_rad": metrics.max_course_change,
        "max_sog_change_mps": metrics.max_sog_change,
        "observable_maneuvers": metrics.observable_maneuvers,
        "obstacles": {
            obs_id: {
                "min_distance_m": m.min_distance,
                "min_clearance_m": m.min_clearance,
                "margin_time_s": m.margin_time,
                "safety_time_s": m.safety_time,
                "collision_time_s": m.collision_time,
                "situation": m.situation,
                "passing_side": m.passing_side,
                "passed_ahead": m.passed_ahead,
                "compliance": m.compliance,
            }
            for obs_id, m in metrics.obstacles.items()
        },
    }
