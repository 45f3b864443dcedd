import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from zollfinsler.zoll import (
    HParam,
    PoleApproachError,
    ZollSurface,
    closure_defect,
    darboux_check,
    first_return_length,
    gauss_curvature,
    gauss_curvature_general,
    h_eval,
    integrate_geodesic,
    state_distance,
    unit_state,
)


@pytest.mark.parametrize(
    "eps, x, expected",
    [(0.25, 0.0, (0.0, 0.25)), (0.25, 1.0, (0.0, -0.5)), (0.1, 0.5, (0.0375, 0.025))],
)
def test_h_eval_examples(eps, x, expected):
    h, dh = h_eval(HParam(eps), x)
    assert h == pytest.approx(expected[0], abs=1e-15)
    assert dh == pytest.approx(expected[1], abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("x", [-0.9, -0.2, 0.0, 0.5, 1.0])
def test_h_eval_matches_symbolic_derivative(n, x):
    e = 0.3 if n == 1 else 1.0
    t = sp.symbols("t")
    h = e * t * (1 - t**2) ** n
    got = h_eval(HParam(e, n=n), x)
    assert got[0] == pytest.approx(float(h.subs(t, x)), abs=1e-15)
    assert got[1] == pytest.approx(float(sp.diff(h, t).subs(t, x)), abs=1e-15)


@pytest.mark.parametrize("x", [1.0000001, -1.5, math.nan])
def test_h_eval_rejects_outside_interval(x):
    with pytest.raises(ValueError):
        h_eval(HParam(0.25), x)


@pytest.mark.parametrize("eps", [0.0, 0.5, -0.1, math.inf])
def test_hparam_range(eps):
    with pytest.raises(ValueError):
        HParam(eps)


def test_hparam_higher_exponent_allows_unit_coefficient():
    h, dh = h_eval(HParam(1.0, n=2), 0.5)
    assert h == pytest.approx(0.5 * 0.75**2)
    assert dh == pytest.approx(0.75 * (0.75 - 4 * 0.25))


@pytest.mark.parametrize("eps, x, expected", [(0.25, 0.0, 1.0), (0.25, 1.0, 1.5)])
def test_gauss_curvature_examples(eps, x, expected):
    # the general curvature formula is the oracle for the simplified one
    p = HParam(eps)
    assert gauss_curvature_general(p, x) == pytest.approx(expected, rel=1e-15)
    assert gauss_curvature(p, x) == pytest.approx(expected, rel=1e-15)


def test_gauss_curvature_round_limit():
    x = np.linspace(-1, 1, 101)
    assert np.max(np.abs(gauss_curvature(HParam(1e-12), x) - 1.0)) < 1e-11


def _brioschi_curvature(eps, r_val):
    # orthogonal metric E dr^2 + G dtheta^2 independent of theta:
    # K = -1/(2 sqrt(EG)) d/dr (G_r / sqrt(EG))
    r = sp.symbols("r")
    x = sp.cos(r)
    f = 1 + eps * x * (1 - x**2)
    E = f**2
    G = sp.sin(r) ** 2
    root = sp.sqrt(E * G)
    K = -sp.diff(sp.diff(G, r) / root, r) / (2 * root)
    return float(K.subs(r, r_val).evalf(30))


@pytest.mark.parametrize("eps", [0.1, 0.25, 0.45])
@pytest.mark.parametrize("r", [0.3, 1.0, 1.9, 2.8])
def test_gauss_curvature_matches_symbolic_metric(eps, r):
    got = gauss_curvature(HParam(eps), math.cos(r))
    assert got == pytest.approx(_brioschi_curvature(sp.Rational(str(eps)), r), rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 0.499), st.floats(-1.0, 1.0))
def test_simplified_and_general_curvature_agree(eps, x):
    p = HParam(eps)
    assert gauss_curvature(p, x) == pytest.approx(gauss_curvature_general(p, x), rel=1e-12)


@pytest.mark.parametrize("p", [HParam(0.25), HParam(0.49), HParam(1.0, n=2)])
def test_darboux_conditions(p):
    report = darboux_check(p)
    assert report.ok, report.margins
    assert report.margins["curvature_positive"] > 0


def test_darboux_grid_size():
    with pytest.raises(ValueError):
        darboux_check(HParam(0.25), grid_size=2)


def test_darboux_flags_large_coefficient():
    # a large coefficient in the n = 2 family breaks |h| < 1 and positivity
    report = darboux_check(HParam(5.0, n=2))
    assert not report.ok


@pytest.fixture
def surface():
    return ZollSurface(HParam(0.25))


def test_equator_closes(surface):
    init = unit_state(surface, math.pi / 2, 0.0, math.pi / 2)
    traj = integrate_geodesic(surface, init, 2 * math.pi)
    final = traj[-1]
    assert final.arclength == pytest.approx(2 * math.pi)
    assert closure_defect(traj) < 1e-6


def test_zero_length_defect(surface):
    init = unit_state(surface, 1.0, 0.3, 0.7)
    traj = integrate_geodesic(surface, init, 0.0)
    assert len(traj) == 1
    assert closure_defect(traj) == 0.0


def test_equator_half_loop_defect(surface):
    init = unit_state(surface, math.pi / 2, 0.0, math.pi / 2)
    traj = integrate_geodesic(surface, init, math.pi)
    # antipodal theta on the unit-radius equator
    assert closure_defect(traj) == pytest.approx(math.pi, abs=1e-6)


def test_round_sphere_great_circle_closes():
    s = ZollSurface(HParam(1e-12))
    init = unit_state(s, 0.9, 1.0, 0.4)
    assert closure_defect(integrate_geodesic(s, init, 2 * math.pi)) < 1e-8


@pytest.mark.parametrize("eps", [0.1, 0.25, 0.4])
def test_random_geodesics_close_with_common_length(eps):
    s = ZollSurface(HParam(eps))
    rng = np.random.default_rng(17)
    for _ in range(3):
        r0 = rng.uniform(0.3, math.pi - 0.3)
        heading = rng.uniform(0.3, math.pi - 0.3) * rng.choice([-1, 1])
        init = unit_state(s, r0, rng.uniform(0, 2 * math.pi), heading)
        traj = integrate_geodesic(s, init, 2 * math.pi + 0.2)
        assert first_return_length(traj.states, traj.s) == pytest.approx(2 * math.pi, abs=1e-4)


def test_first_integrals_are_conserved(surface):
    init = unit_state(surface, 1.1, 0.0, 0.9)
    traj = integrate_geodesic(surface, init, 2 * math.pi)
    speed = surface.speed2(traj.r, traj.r_dot, traj.theta_dot)
    clairaut = surface.clairaut(traj.r, traj.theta_dot)
    assert np.max(np.abs(speed - 1.0)) < 1e-8
    assert np.max(np.abs(clairaut - clairaut[0])) < 1e-8


def test_meridian_runs_through_poles(surface):
    init = unit_state(surface, 1.0, 0.5, 0.0)
    traj = integrate_geodesic(surface, init, 2 * math.pi)
    assert traj.meridian
    assert closure_defect(traj) < 1e-6
    # the far side of the sphere is reached with theta shifted by pi
    assert np.any(np.abs(traj.theta - (0.5 + math.pi)) < 1e-12)


def test_near_pole_geodesic_is_rejected(surface):
    init = unit_state(surface, 1.0, 0.0, 1e-5)
    with pytest.raises(PoleApproachError):
        integrate_geodesic(surface, init, 1.0)


@pytest.mark.parametrize("length, step", [(-1.0, 1e-3), (math.inf, 1e-3), (1.0, 0.0), (1.0, 0.1)])
def test_invalid_run_parameters(surface, length, step):
    init = unit_state(surface, 1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        integrate_geodesic(surface, init, length, step)


def test_non_multiple_length_lands_exactly(surface):
    init = unit_state(surface, 1.0, 0.0, 0.5)
    traj = integrate_geodesic(surface, init, 0.01234)
    assert traj.s[-1] == pytest.approx(0.01234, abs=1e-15)


def test_state_distance_wraps_theta():
    a = np.array([1.0, 2 * math.pi - 1e-3, 0.0, 1.0])
    b = np.array([1.0, 1e-3, 0.0, 1.0])
    assert state_distance(a, b) == pytest.approx(2e-3)


def test_first_return_length_none_when_not_returning():
    s = np.linspace(0, 1, 101)
    states = np.stack([1 + s, np.zeros_like(s), np.ones_like(s), np.zeros_like(s)], -1)
    assert math.isnan(first_return_length(states, s))
