import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from colavmpc.core import TimeGrid, VelocityTrajectory, cumtrapz, resample, wrap_angle

angles = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def test_wrap_angle_examples():
    assert wrap_angle(0.0) == 0.0
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2, abs=1e-12)
    assert wrap_angle(-math.pi) == -math.pi  # lower boundary included


def test_wrap_angle_range_and_array():
    vals = wrap_angle(np.linspace(-20.0, 20.0, 1001))
    assert np.all(vals >= -math.pi) and np.all(vals < math.pi)


def test_wrap_angle_rejects_non_finite():
    with pytest.raises(ValueError):
        wrap_angle(math.inf)
    with pytest.raises(ValueError):
        wrap_angle(np.array([0.0, math.nan]))


@given(angles)
def test_wrap_angle_idempotent(a):
    assert wrap_angle(wrap_angle(a)) == pytest.approx(wrap_angle(a), abs=1e-12)


@given(st.floats(min_value=-100.0, max_value=100.0), st.integers(min_value=-10, max_value=10))
def test_wrap_angle_periodic(a, k):
    assert wrap_angle(a + 2 * math.pi * k) == pytest.approx(wrap_angle(a), abs=1e-12)


def test_time_grid_invariants():
    with pytest.raises(ValueError):
        TimeGrid(0.0, -0.1, 10)
    with pytest.raises(ValueError):
        TimeGrid(0.0, 0.1, 1)
    g = TimeGrid.from_span(2.0, 5.0, 0.5)
    assert g.n == 11 and g.t_end == pytest.approx(7.0)
    with pytest.raises(ValueError):
        TimeGrid.from_span(0.0, 5.2, 0.5)


def test_cumtrapz_matches_numpy_trapezoid():
    rng = np.random.default_rng(3)
    y = rng.normal(size=(4, 17))
    out = cumtrapz(y, 0.25)
    assert out.shape == y.shape
    assert np.allclose(out[:, -1], np.trapezoid(y, dx=0.25, axis=-1))
    assert np.all(out[:, 0] == 0.0)


def _ramp_trajectory():
    grid = TimeGrid(0.0, 1.0, 11)
    sog = np.linspace(0.0, 1.0, 11)
    return VelocityTrajectory(
        grid=grid,
        sog=sog,
        rot=np.zeros(11),
        course=np.linspace(0.0, 0.5, 11),
        sog_acc=np.full(11, 0.1),
        rot_acc=np.zeros(11),
    )


def test_resample_identity():
    traj = _ramp_trajectory()
    out = resample(traj, traj.grid)
    for name in ("sog", "rot", "course", "sog_acc", "rot_acc"):
        np.testing.assert_allclose(getattr(out, name), getattr(traj, name), atol=1e-12)


def test_resample_constant():
    grid = TimeGrid(0.0, 0.5, 21)
    traj = VelocityTrajectory.constant(grid, 4.0, 0.3)
    out = resample(traj, TimeGrid(1.0, 0.7, 9))
    assert np.all(out.sog == 4.0)
    assert np.all(out.course == 0.3)


def test_resample_linear_midpoint():
    traj = _ramp_trajectory()
    out = resample(traj, TimeGrid(5.0, 0.1, 2))
    assert out.sog[0] == pytest.approx(0.5, abs=1e-12)


def test_resample_reproduces_source_points():
    traj = _ramp_trajectory()
    sub = TimeGrid(2.0, 1.0, 6)  # source points 2..7
    out = resample(traj, sub)
    np.testing.assert_allclose(out.sog, traj.sog[2:8], atol=1e-12)
    np.testing.assert_allclose(out.course, traj.course[2:8], atol=1e-12)


def test_resample_outside_span_rejected():
    traj = _ramp_trajectory()
    with pytest.raises(ValueError):
        resample(traj, TimeGrid(8.0, 1.0, 5))


def test_trajectory_length_validation():
    grid = TimeGrid(0.0, 0.5, 4)
    with pytest.raises(ValueError):
        VelocityTrajectory(
            grid=grid,
            sog=np.zeros(3),
            rot=np.zeros(4),
            course=np.zeros(4),
            sog_acc=np.zeros(4),
            rot_acc=np.zeros(4),
        )
