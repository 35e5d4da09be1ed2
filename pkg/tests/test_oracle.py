import math

import numpy as np
import pytest

from nonscatter.density import HerglotzDensity
from nonscatter.errors import AliasingError, UnsupportedParameterError, ValidationError
from nonscatter.geometry import RadiusFunction
from nonscatter.oracle import (
    QuadratureSpec,
    eta_grid_size,
    integral_area,
    integral_circle_closed_form,
    integral_I,
    integral_I1_explicit,
    integral_I_many,
    integral_I_N,
    integral_I_N_at,
)

# independent high-precision quadrature (mpmath, 40 digits) of the circle integral
FROZEN = [
    (15.0, HerglotzDensity.constant(), 0.0, 0.8327089758650233j),
    (10.0, HerglotzDensity.fourier({-1: 1}), 0.3, 0.3611849073749341 + 1.167612615174403j),
]


@pytest.mark.parametrize("k,phi,eta,expected", FROZEN)
def test_frozen_circle_values(circle, k, phi, eta, expected):
    r = integral_I(circle, 4.0, phi, eta, k)
    assert r.converged
    assert abs(r.value - expected) < 1e-10


@pytest.mark.parametrize("k", [3.0, 12.0, 40.0])
def test_circle_closed_form(circle, k):
    phi = HerglotzDensity.fourier({0: 0.5, 2: 1 - 1j, -3: 0.2j})
    for eta in (0.0, 1.1, 4.0):
        a = integral_I(circle, 4.0, phi, eta, k)
        b = integral_circle_closed_form(1.0, 4.0, phi, eta, k)
        assert abs(a.value - b) <= 1e-8 * a.scale


def test_zero_density(ellipse):
    r = integral_I(ellipse, 4.0, HerglotzDensity.zero(), 0.5, 20.0)
    assert r.value == 0 and r.converged


def test_many_matches_single(ellipse, e_minus):
    etas = [0.0, 0.9, 2.5]
    many = integral_I_many(ellipse, 4.0, e_minus, etas, 17.0)
    for eta, r in zip(etas, many):
        assert r.value == pytest.approx(integral_I(ellipse, 4.0, e_minus, eta, 17.0).value, abs=1e-13)


@pytest.mark.parametrize("k", [8.0, 20.0])
def test_area_form(ellipse, k):
    phi = HerglotzDensity.fourier({-1: 1, 1: 0.3})
    b = integral_I(ellipse, 4.0, phi, 0.4, k)
    a = integral_area(ellipse, 4.0, phi, 0.4, k)
    assert abs(a.value - b.value) <= 1e-8 * b.scale


def test_area_form_offset_disk(disk2):
    phi = HerglotzDensity.constant()
    b = integral_I(disk2, 4.0, phi, 1.0, 12.0)
    a = integral_area(disk2, 4.0, phi, 1.0, 12.0)
    assert abs(a.value - b.value) <= 1e-8 * b.scale


def test_unconverged_flag(ellipse, e_minus):
    r = integral_I(ellipse, 4.0, e_minus, 0.3, 60.0, QuadratureSpec(nodes_theta=64, nodes_xi=64))
    assert not r.converged and r.error > 1e-8 * r.scale


def test_spectral_collapse(ellipse, e_minus):
    ref = integral_I(ellipse, 4.0, e_minus, 0.3, 10.0).value
    errs = [
        abs(integral_I(ellipse, 4.0, e_minus, 0.3, 10.0, QuadratureSpec(nodes_theta=n, nodes_xi=n)).value - ref)
        for n in (64, 96, 128)
    ]
    assert errs[2] < 1e-12 and errs[0] > 100 * max(errs[2], 1e-16)


def test_rotation_equivariance(ellipse):
    phi = HerglotzDensity.fourier({-1: 1, 2: 0.3 - 0.1j})
    a = integral_I(ellipse, 4.0, phi, 0.5, 17.0).value
    for al in (0.3, 2.0):
        b = integral_I(ellipse.rotated(al), 4.0, phi.rotated(al), 0.5 + al, 17.0).value
        assert abs(a - b) < 1e-9


def test_conjugate_symmetry(circle, ellipse):
    coeffs = {-1: 1, 2: 0.3 - 0.1j}
    phi = HerglotzDensity.fourier(coeffs)
    # conj(phi(-t)) has the conjugated Fourier coefficients
    tilde = HerglotzDensity.fourier({m: np.conj(c) for m, c in coeffs.items()})
    for rf in (circle, ellipse):
        for eta in (0.4, 2.2):
            a = integral_I(rf, 4.0, tilde, -eta, 13.0).value
            b = integral_I(rf, 4.0, phi, eta, 13.0).value
            assert abs(a + np.conj(b)) < 1e-10


def test_disk_nonscattering_root(circle):
    k_star = 2.902608055212766  # n = 1, q = 4, R0 = 1
    phi = HerglotzDensity.fourier({-1: 1})
    etas = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    at_root = max(abs(r.value) for r in integral_I_many(circle, 4.0, phi, etas, k_star))
    nearby = np.median([abs(r.value) for k in (2.5, 3.3) for r in integral_I_many(circle, 4.0, phi, etas, k)])
    assert at_root < 1e-10 * nearby


def test_N_zero_path(ellipse, e_minus):
    grid = integral_I_N(ellipse, 4.0, e_minus, 64, 5.0, 0)
    direct = [integral_I(ellipse, 4.0, e_minus, t, 5.0).value for t in grid.eta[:3]]
    np.testing.assert_allclose(grid.values[:3], direct, atol=1e-13)


def test_first_derivative_spectral_vs_explicit(ellipse, e_minus):
    k = 12.0
    etas = np.array([0.2, 1.7, 4.4])
    spectral = integral_I_N_at(ellipse, 4.0, e_minus, etas, k, 1)
    explicit = integral_I1_explicit(ellipse, 4.0, e_minus, etas, k)
    np.testing.assert_allclose(spectral, explicit, rtol=1e-9)


def test_first_derivative_circle_is_zero(circle, ones):
    # for a circle and phi = 1 the integral does not depend on eta
    k = 10.0
    scale = k * abs(integral_I(circle, 4.0, ones, 0.0, k).value)
    d = integral_I1_explicit(circle, 4.0, ones, [0.0, 1.0], k)
    assert np.max(np.abs(d)) < 1e-10 * scale


def test_second_derivative_consistency(disk2, e_minus):
    k = 9.0
    M = eta_grid_size(disk2, 4.0, k, 2)
    g1 = integral_I_N(disk2, 4.0, e_minus, M, k, 1)
    g2 = integral_I_N(disk2, 4.0, e_minus, M, k, 2)
    c = np.fft.fft(g1.values)
    m = np.fft.fftfreq(M, 1.0 / M)
    c[m == -M // 2] = 0
    d = np.fft.ifft(1j * m * c)
    assert np.max(np.abs(d - g2.values)) < 1e-9 * np.max(np.abs(g2.values))


def test_aliasing_detected(ellipse, e_minus):
    with pytest.raises(AliasingError):
        integral_I_N(ellipse, 4.0, e_minus, 64, 40.0, 1)


def test_grid_validation(ellipse, e_minus):
    with pytest.raises(ValidationError):
        integral_I_N(ellipse, 4.0, e_minus, 62, 1.0, 0)
    with pytest.raises(ValidationError):
        integral_I_N(ellipse, 4.0, e_minus, np.linspace(0, 1, 64), 1.0, 0)


def test_bad_parameters(circle, ones):
    with pytest.raises(UnsupportedParameterError):
        integral_I(circle, 1.0, ones, 0.0, 5.0)
    with pytest.raises(UnsupportedParameterError):
        integral_I(circle, 4.0, ones, 0.0, 0.0)
    with pytest.raises(ValidationError):
        QuadratureSpec(min_nodes=8)
