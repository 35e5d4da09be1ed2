import math

import numpy as np
import pytest

from nonscatter.errors import AdmissibilityError, BranchViolationError, UnsupportedParameterError
from nonscatter.geometry import RadiusFunction
from nonscatter.stationary import (
    MapSpec,
    T_derivative,
    T_lift,
    branch_interval,
    branch_offset,
    branch_roots,
    closed_form_residuals,
    compose_iterate,
    ellipse_stationary_set,
    ellipse_T,
    ellipse_T_derivative,
    expected_signs,
    h_function,
    inverse_T,
    solve_T,
    star_hessian_closed_form,
    stationarity_residuals,
    stationary_set,
    theta_q,
    wrap_pi,
)

TWO_PI = 2 * math.pi


def test_h_at_zero():
    h, hp = h_function(4.0, 0.0)
    assert h == 0 and hp == pytest.approx(2 / 3)


def test_h_derivative_q9_at_pi():
    assert h_function(9.0, math.pi)[1] == pytest.approx(1.5, rel=1e-14)


def test_theta_q():
    assert theta_q(9.0) == pytest.approx(math.acos(1 / 3), rel=1e-15)
    assert theta_q(9.0) == pytest.approx(1.230959, abs=1e-6)


def test_h_pole():
    with pytest.raises(BranchViolationError):
        h_function(4.0, math.acos(-0.5))


def test_circle_maps(circle):
    for eta in (0.0, 1.3, 4.0):
        assert solve_T(circle, 4.0, eta, 1, 1) == pytest.approx(eta, abs=1e-12)
        assert solve_T(circle, 4.0, eta, 2, 1) == pytest.approx((eta + math.pi) % TWO_PI, abs=1e-12)
        assert T_derivative(circle, 4.0, eta, 1, 1) == pytest.approx(1.0, abs=1e-14)
        assert inverse_T(circle, 4.0, eta, 1, 1) == pytest.approx(eta, abs=1e-12)


def test_offset_disk_axis(disk2):
    assert solve_T(disk2, 4.0, 0.0, 1, 1) == pytest.approx(0.0, abs=1e-12)


def test_ellipse_closed_form_identities(ellipse):
    for j in (1, 2):
        for l in (1, 2):
            for r in closed_form_residuals(ellipse, 4.0, 0.7, j, l):
                assert abs(r) < 1e-12


def test_circle_stationary_set(circle):
    pts = {p.label: p for p in stationary_set(circle, 4.0, 0.0)}
    p11 = pts[(1, 1)]
    assert p11.psi == pytest.approx(3) and p11.Psi == pytest.approx(1)
    assert abs(p11.det) == pytest.approx(2.0) and p11.signature == -2
    assert pts[(1, 2)].psi == pytest.approx(-3) and pts[(1, 2)].Psi == pytest.approx(-1)
    assert all(p.f == pytest.approx(0, abs=1e-15) for p in pts.values())


def test_ellipse_signatures_and_invariants(ellipse):
    for p in stationary_set(ellipse, 4.0, 0.7):
        sgn_psi, sgn_det, sig = expected_signs(p.j, p.l)
        assert np.sign(p.psi) == np.sign(p.Psi) == sgn_psi
        assert np.sign(p.det) == sgn_det and p.signature == sig
        a, b = stationarity_residuals(ellipse, 4.0, p)
        assert max(a, b) < 1e-10 * (1 + ellipse(p.theta))
        assert p.Psi == pytest.approx(3 * ellipse(p.theta) ** 2 / p.psi, rel=1e-10)
        np.testing.assert_allclose(star_hessian_closed_form(ellipse, 4.0, p), p.hessian, atol=1e-12)


def test_theta_xi_convention(ellipse):
    for p in stationary_set(ellipse, 4.0, 1.1):
        expected = p.theta if p.l == 1 else (p.theta + math.pi) % TWO_PI
        assert abs(wrap_pi(p.theta_xi - expected)) < 1e-12


def test_T_derivative_positive_and_matches_fd(disk2):
    h = 1e-5
    for j in (1, 2):
        for l in (1, 2):
            d = T_derivative(disk2, 4.0, 0.3, j, l)
            fd = (T_lift(disk2, 4.0, 0.3 + h, j, l) - T_lift(disk2, 4.0, 0.3 - h, j, l)) / (2 * h)
            assert d > 0 and d == pytest.approx(fd, rel=1e-5)


def test_inverse_round_trip(disk2):
    rng = np.random.default_rng(3)
    for th in rng.uniform(0, TWO_PI, 100):
        for j in (1, 2):
            for l in (1, 2):
                back = solve_T(disk2, 4.0, inverse_T(disk2, 4.0, th, j, l), j, l)
                assert abs(wrap_pi(back - th)) < 1e-10


def test_monotone_bijectivity(disk2):
    etas = np.arange(128) * TWO_PI / 128
    for j in (1, 2):
        for l in (1, 2):
            lift = np.unwrap([solve_T(disk2, 4.0, e, j, l) for e in etas])
            assert np.all(np.diff(lift) > 0)
            end = np.unwrap([lift[-1] % TWO_PI, solve_T(disk2, 4.0, TWO_PI, j, l)])[1]
            assert end - lift[0] + (lift[-1] - (lift[-1] % TWO_PI)) - 0 == pytest.approx(TWO_PI, abs=1e-9)


def test_vectorized_offsets_agree(ellipse):
    etas = np.linspace(0, TWO_PI, 17)
    vec = branch_offset(ellipse, 4.0, etas, 2, 1)
    single = [branch_offset(ellipse, 4.0, e, 2, 1) for e in etas]
    np.testing.assert_allclose(vec, single, atol=0)


def test_non_admissible_raises_or_reports_roots():
    rf = RadiusFunction.centered_ellipse(3.0, 1.0)
    bad = 0
    for eta in np.linspace(0, math.pi, 60):
        roots = branch_roots(rf, 4.0, eta, 1, 1)
        if len(roots) != 1:
            bad += 1
            with pytest.raises(AdmissibilityError):
                branch_offset(rf, 4.0, eta, 1, 1)
    assert bad > 0


def test_ellipse_axis_cases():
    assert ellipse_T(1.0, math.sqrt(0.8), 4.0, 0.0, 1) == pytest.approx(0.0, abs=1e-15)
    assert ellipse_T(1.0, math.sqrt(0.8), 4.0, 0.0, 2) == pytest.approx(math.pi, abs=1e-15)


def test_ellipse_axis_derivative():
    s2 = 0.8
    expected = s2 * 2 / (2 + (1 - s2))
    assert expected == pytest.approx(0.72727, abs=1e-5)
    assert ellipse_T_derivative(1.0, math.sqrt(s2), 4.0, 0.0, 1) == pytest.approx(expected, rel=1e-14)
    h = 1e-5
    fd = (ellipse_T(1.0, math.sqrt(s2), 4.0, h, 1) - wrap_pi(ellipse_T(1.0, math.sqrt(s2), 4.0, -h, 1))) / (2 * h)
    assert fd == pytest.approx(expected, rel=1e-6)


def test_ellipse_cosine_ordering():
    b = math.sqrt(0.8)
    t1, t2 = ellipse_T(1.0, b, 4.0, 0.7, 1), ellipse_T(1.0, b, 4.0, 0.7, 2)
    assert abs(math.cos(t2)) < abs(math.cos(t1))


def test_ellipse_hypothesis():
    with pytest.raises(UnsupportedParameterError):
        ellipse_T(1.0, 0.5, 4.0, 0.3, 1)


def test_ellipse_generic_cross_check(ellipse):
    for eta in np.linspace(0.05, 6.2, 13):
        gen = {p.label: p for p in stationary_set(ellipse, 4.0, eta)}
        par = {p.label: p for p in ellipse_stationary_set(1.2, 1.0, 4.0, eta)}
        for lab in gen:
            a, b = gen[lab], par[lab]
            assert abs(wrap_pi(a.theta_xi - b.theta_xi)) < 1e-9
            assert a.signature == b.signature
            assert a.Psi / math.sqrt(abs(a.det)) == pytest.approx(b.Psi / math.sqrt(abs(b.det)), rel=1e-9)


def test_ellipse_orbit_contracts():
    b = math.sqrt(0.8)
    spec = MapSpec.parse("T2^-1 T1", 4.0, ellipse=(1.0, b))
    t = 0.3
    orbit = compose_iterate(spec, t, 2)
    t2 = orbit.normalized[2]
    shifted = compose_iterate(spec, t + math.pi, 1).normalized[1]
    assert 0 < t2 < shifted < t
    assert math.pi < orbit.normalized[1] < t + math.pi


def test_circle_orbit_is_shift(circle):
    spec = MapSpec.parse("T21 T11", 4.0, rf=circle)
    orbit = compose_iterate(spec, 0.4, 3)
    np.testing.assert_allclose(np.diff(orbit.lifted), math.pi, atol=1e-12)


def test_egg_orbit_decreases_to_zero(egg):
    t0 = MapSpec.parse("-pi T12 T11^-1", 4.0, rf=egg, confine=(0.0, math.pi / 2))
    t11_inv = MapSpec.parse("T11^-1", 4.0, rf=egg)
    for t in np.linspace(0.05, math.pi / 2 - 0.05, 12):
        assert 0 < t0.apply(t) <= t11_inv.apply(t) + 1e-14 < t
    orbit = compose_iterate(t0, 1.0, 8)
    assert not any(orbit.increasing) and all(orbit.confined)


@pytest.mark.parametrize("flavour", ["ellipse", "star"])
def test_tilde_orbit_increases_to_half_pi(flavour):
    b = math.sqrt(0.8)
    if flavour == "ellipse":
        spec = MapSpec.parse("T1^-1 T2 T1^-1 T2", 4.0, ellipse=(1.0, b))
    else:
        spec = MapSpec.parse("T11^-1 T21 T11^-1 T21", 4.0, rf=RadiusFunction.centered_ellipse(1.0, b))
    orbit = compose_iterate(spec, 0.3, 12)
    vals = orbit.normalized
    assert all(a < c < math.pi / 2 for a, c in zip(vals, vals[1:]))
    assert vals[-1] > 1.5


def test_bad_token():
    with pytest.raises(Exception):
        MapSpec.parse("T3", 4.0, ellipse=(1.0, 0.9))


@pytest.mark.parametrize("q", [2.0, 4.0, 9.0])
def test_branch_interval(q):
    lo, hi = branch_interval(q, 1)
    assert lo == pytest.approx(theta_q(q) - math.pi) and hi == pytest.approx(math.pi - theta_q(q))
