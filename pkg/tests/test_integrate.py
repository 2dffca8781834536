import math

import numpy as np
import pytest

from kleinflow.integrate import StepControl, dopri5, hermite


def _rhs(f):
    return lambda t, y: (f(t, y), 1.0)


def test_exponential_decay():
    sol = dopri5(_rhs(lambda t, y: -0.5 * y), 0.0, 1.0, 10.0, StepControl(1e-10, 1e-12))
    assert sol.status == "completed"
    assert sol.t[-1] == 10.0
    assert sol.y[-1] == pytest.approx(math.exp(-5), rel=1e-8)
    assert np.all(np.diff(sol.t) > 0)


def test_backward_direction():
    sol = dopri5(_rhs(lambda t, y: math.cos(t)), 0.0, 0.0, -3.0, StepControl(1e-10, 1e-12))
    assert np.all(np.diff(sol.t) < 0)
    assert sol.y[-1] == pytest.approx(math.sin(-3.0), abs=1e-9)


def test_zero_span():
    sol = dopri5(_rhs(lambda t, y: 1.0), 2.0, 1.0, 2.0, StepControl())
    assert sol.status == "completed" and len(sol.t) == 1


def test_error_estimate_tracks_tolerance():
    f = _rhs(lambda t, y: math.sin(t) * y)
    exact = math.exp(1 - math.cos(20.0))
    errs = []
    for rtol in (1e-5, 1e-8, 1e-11):
        sol = dopri5(f, 0.0, 1.0, 20.0, StepControl(rtol, rtol * 1e-2))
        errs.append(abs(sol.y[-1] - exact) / exact)
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-9


def test_low_density_abort():
    # density falls linearly and crosses the floor at t = 5
    rhs = lambda t, y: (0.1, 10.0 - 2.0 * t)  # noqa: E731
    sol = dopri5(rhs, 0.0, 0.0, 10.0, StepControl(max_step=0.5), density_floor=0.0)
    assert sol.status == "aborted_low_density"
    assert sol.t[-1] <= 5.0 + 0.5


def test_step_limit():
    sol = dopri5(_rhs(lambda t, y: 1.0), 0.0, 0.0, 100.0, StepControl(max_step=0.1, max_steps=10))
    assert sol.status == "aborted_step_limit"
    assert sol.steps == 10


def test_leaving_bounds_completes():
    sol = dopri5(_rhs(lambda t, y: 0.5), 0.0, 0.0, 100.0, StepControl(max_step=1.0),
                 y_bounds=(-1.0, 3.0))
    assert sol.status == "completed"
    assert "left" in sol.message
    assert sol.t[-1] < 100.0


def test_local_cap_is_respected():
    ctl = StepControl(local_cap=lambda t, y: 0.25)
    sol = dopri5(_rhs(lambda t, y: 0.0), 0.0, 0.0, 5.0, ctl)
    assert np.max(np.diff(sol.t)) <= 0.25 + 1e-15


def test_hermite_interpolation_exact_for_cubics():
    t = np.array([0.0, 0.7, 2.0])
    f = lambda x: x ** 3 - 2 * x  # noqa: E731
    df = lambda x: 3 * x ** 2 - 2  # noqa: E731
    tq = np.linspace(0, 2, 17)
    assert hermite(t, f(t), df(t), tq) == pytest.approx(f(tq), abs=1e-13)
