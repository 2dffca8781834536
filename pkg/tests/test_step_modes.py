import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kleinflow.diagnostics import dirac_residual
from kleinflow.dispersion import PhysicalParams, fixed_point_k0
from kleinflow.free_modes import INV_SQRT_2PI, u_components
from kleinflow.identities import solve_matching
from kleinflow.spinor import SpacetimePoint, current_of
from kleinflow.step_modes import (NoKleinRegime, OutsideKleinWindow, closed_form_trajectory,
                                  current_step_arrays, current_step_mode, eval_step_mode,
                                  make_step_mode, step_coefficients, step_mode_arrays,
                                  transmitted_velocity, velocity_bounds, velocity_step_mode,
                                  velocity_step_x1)


def test_coefficients_fig1(fig1):
    m = make_step_mode(0.5, fig1)
    assert m.q == pytest.approx(0.5304215782, rel=1e-9)
    assert m.r == pytest.approx(-0.8890514158, rel=1e-9)
    assert m.t == pytest.approx(-0.4444850743, rel=1e-9)


def test_coefficients_match_linear_solve(fig1):
    m = make_step_mode(0.5, fig1)
    beta, gamma = solve_matching(0.5, fig1)
    assert beta == pytest.approx(m.r, abs=1e-12)
    assert gamma == pytest.approx(m.t, abs=1e-12)


@pytest.mark.parametrize("k,q,r,t", [(0.3, 2.7816820, -0.8129045, -0.1912608),
                                     (2.7, 0.5060750, -0.7151354, -1.6145180)])
def test_coefficients_v4(v4, k, q, r, t):
    got = step_coefficients(k, v4)
    assert got == pytest.approx((q, r, t), rel=1e-6)


def test_fixed_point_mode(v4):
    k0 = fixed_point_k0(v4)
    assert make_step_mode(k0, v4).q == pytest.approx(k0, rel=1e-12)


def test_domain_errors(v4):
    with pytest.raises(NoKleinRegime):
        make_step_mode(0.5, PhysicalParams(1.0, 1.5))
    with pytest.raises(OutsideKleinWindow):
        make_step_mode(-0.1, v4)
    with pytest.raises(OutsideKleinWindow):
        make_step_mode(3.0, v4)


@settings(max_examples=60)
@given(st.floats(2.05, 10.0), st.floats(0.01, 0.99))
def test_type_invariants(V, u):
    p = PhysicalParams(1.0, V)
    m = make_step_mode(u * p.k_max, p)
    assert m.omega + m.omega_q == pytest.approx(V, rel=1e-12)
    assert -1 < m.r < 0
    assert m.t < 0
    assert m.omega * (1 + m.r ** 2) + 2 * m.r == pytest.approx(m.omega_q * m.t ** 2, rel=1e-12)
    assert m.k * (1 - m.r ** 2) == pytest.approx(m.q * m.t ** 2, rel=1e-11)
    assert m.reflection + m.transmission == pytest.approx(1.0, rel=1e-12)


def test_continuity_across_step(fig1):
    m = make_step_mode(0.5, fig1)
    left = eval_step_mode(m, SpacetimePoint(0.7, -1e-300))
    right = eval_step_mode(m, SpacetimePoint(0.7, 0.0))
    assert left.c1 == pytest.approx(right.c1, abs=1e-14)
    assert left.c2 == pytest.approx(right.c2, abs=1e-14)


def test_value_at_minus_pi_over_k(fig1):
    m = make_step_mode(0.5, fig1)
    s = eval_step_mode(m, SpacetimePoint(0.0, -math.pi / 0.5))
    u1, u2 = u_components(0.5, fig1)
    w1, w2 = u_components(-0.5, fig1)
    assert s.c1 == pytest.approx(-(u1 + m.r * w1) * INV_SQRT_2PI, abs=1e-14)
    assert s.c2 == pytest.approx(-(u2 + m.r * w2) * INV_SQRT_2PI, abs=1e-14)


def test_solves_dirac_equation_off_step(fig1):
    m = make_step_mode(0.5, fig1)
    rng = np.random.default_rng(5)
    x0 = rng.uniform(-30, 30, 200)
    x1 = rng.uniform(-30, 30, 200)
    x1 = np.where(np.abs(x1) < 1e-3, 0.5, x1)
    r1, r2 = dirac_residual(lambda a, b: step_mode_arrays(m, a, b), x0, x1, 2.25, 1.0)
    assert np.max(np.abs(r1)) < 1e-6 and np.max(np.abs(r2)) < 1e-6


def test_current_matches_wave_function(fig1):
    m = make_step_mode(0.5, fig1)
    rng = np.random.default_rng(7)
    x0, x1 = rng.uniform(-100, 100, (2, 1000))
    c1, c2 = step_mode_arrays(m, x0, x1)
    j0, j1 = current_step_arrays(m, x0, x1)
    a, b = np.abs(c1) ** 2, np.abs(c2) ** 2
    assert np.max(np.abs(a + b - j0) / j0) < 1e-10
    assert np.max(np.abs(a - b - j1) / np.abs(j1)) < 1e-10


def test_current_values(fig1):
    m = make_step_mode(0.5, fig1)
    j = current_step_mode(m, SpacetimePoint(0.0, 3.0))
    assert (j.j0, j.j1) == pytest.approx((0.0711865, 0.0333569), rel=1e-5)
    assert current_step_mode(m, SpacetimePoint(0.0, 0.0)) == pytest.approx(j, rel=1e-14)
    # at x1 = -pi/k the interference term 1 - cos(2 k x1) vanishes
    jm = current_step_mode(m, SpacetimePoint(0.0, -math.pi / 0.5))
    direct = current_of(eval_step_mode(m, SpacetimePoint(0.0, -math.pi / 0.5)))
    assert jm.j0 == pytest.approx(direct.j0, rel=1e-12)
    assert jm.j0 == pytest.approx(0.0711865, rel=1e-5)
    # maximum of the density at x1 = -pi/(2k)
    jx = current_step_mode(m, SpacetimePoint(0.0, -math.pi))
    assert jx.j0 == pytest.approx(0.0711865 + 4 * 0.8890514158 / math.pi, rel=1e-6)


def test_current_divergence_free_and_timelike(fig1):
    m = make_step_mode(0.5, fig1)
    x1 = np.linspace(-40, 40, 2001)
    h = 1e-3
    j0, j1 = current_step_arrays(m, 0.0, x1)
    _, j1p = current_step_arrays(m, 0.0, x1 + h)
    _, j1m = current_step_arrays(m, 0.0, x1 - h)
    # j0 is x0-independent, so the divergence is d1 j1
    assert np.max(np.abs((j1p - j1m) / (2 * h))) < 1e-6
    assert np.all(j0 > 0)
    assert np.all(j0 ** 2 - j1 ** 2 >= m.t ** 4 / math.pi ** 2 * (1 - 1e-12))


def test_velocity_values(fig1):
    m = make_step_mode(0.5, fig1)
    assert velocity_step_mode(m, SpacetimePoint(0, 5.0)) == pytest.approx(0.4685844, rel=1e-6)
    assert velocity_step_x1(m, 0.0) == pytest.approx(0.4685844, rel=1e-6)
    vmin, vmax = velocity_bounds(m)
    assert vmin == pytest.approx(0.0277244, rel=1e-5)
    xs = np.linspace(-2 * math.pi, 0, 20001)
    vs = np.array([velocity_step_x1(m, x) for x in xs])
    assert vs.min() == pytest.approx(vmin, rel=1e-6)
    assert vs.max() == pytest.approx(vmax, rel=1e-12)
    assert 0 < vmin < vmax < 1
    assert transmitted_velocity(m) == pytest.approx(vmax, rel=1e-14)


def test_closed_form_trajectory(fig1):
    m = make_step_mode(0.5, fig1)
    assert closed_form_trajectory(m, 2.0, 0.0) == 2.0
    assert closed_form_trajectory(m, 0.0, 10.0) == pytest.approx(21.340874, rel=1e-7)
    assert closed_form_trajectory(m, 5.5, -7.3) == pytest.approx(
        closed_form_trajectory(m, 0.0, -7.3) + 5.5, abs=1e-12)
    xs = np.linspace(-50, 50, 5001)
    x0 = closed_form_trajectory(m, 0.0, xs)
    assert np.all(np.diff(x0) > 0)


def test_closed_form_slope_is_inverse_velocity(fig1):
    m = make_step_mode(0.5, fig1)
    h = 1e-5
    for x in (-37.1, -3.0, -0.2, 4.0):
        slope = (closed_form_trajectory(m, 0, x + h) - closed_form_trajectory(m, 0, x - h)) / (2 * h)
        assert slope == pytest.approx(1 / velocity_step_x1(m, x), rel=1e-7)
