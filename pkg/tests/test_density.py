import math

import numpy as np
import pytest

from nonscatter.density import HerglotzDensity, eval_density, helmholtz_residual, herglotz_wave
from nonscatter.disk import bessel_j
from nonscatter.errors import UnsupportedParameterError, ValidationError


def test_single_mode():
    assert eval_density(HerglotzDensity.fourier({-1: 1}), math.pi / 2) == pytest.approx(-1j, abs=1e-15)


def test_constant():
    assert HerglotzDensity.fourier({0: 1})(2.7) == 1


def test_tabulated_cosine_is_exact():
    t = np.arange(64) * 2 * math.pi / 64
    phi = HerglotzDensity.from_samples(np.cos(t))
    assert phi(0.3) == pytest.approx(math.cos(0.3), abs=1e-12)
    assert phi.analyticity == "unknown"


def test_too_few_samples():
    with pytest.raises(ValidationError):
        HerglotzDensity.from_samples(np.ones(8))


def test_wave_at_origin():
    assert herglotz_wave(HerglotzDensity.constant(), 3.0, [0.0, 0.0]) == pytest.approx(2 * math.pi, rel=1e-15)


def test_wave_is_bessel_j0():
    val = herglotz_wave(HerglotzDensity.constant(), 1.0, [1.0, 0.0])
    assert val == pytest.approx(2 * math.pi * bessel_j(0, 1.0), rel=1e-12)


def test_wave_magnitude_j1():
    val = herglotz_wave(HerglotzDensity.fourier({-1: 1}), 2.0, [1.0, 0.0])
    assert abs(val) == pytest.approx(2 * math.pi * abs(bessel_j(1, 2.0)), rel=1e-12)


def test_wave_requires_positive_k():
    with pytest.raises(UnsupportedParameterError):
        herglotz_wave(HerglotzDensity.constant(), 0.0, [0.0, 0.0])


def test_helmholtz_residual_small_and_second_order():
    phi = HerglotzDensity.constant()
    x = [0.5, 0.2]
    r1 = helmholtz_residual(phi, 1.0, x, 1e-2)
    r2 = helmholtz_residual(phi, 1.0, x, 5e-3)
    assert helmholtz_residual(phi, 1.0, x, 1e-3) < 1e-4
    assert 3.5 <= r1 / r2 <= 4.5


def test_helmholtz_step_range():
    with pytest.raises(UnsupportedParameterError):
        helmholtz_residual(HerglotzDensity.constant(), 5.0, [0, 0], 0.05)


def test_node_doubling_stable():
    phi = HerglotzDensity.fourier({0: 1, 2: 0.5j, -3: 0.2})
    x = [1.3, -0.7]
    a = herglotz_wave(phi, 12.0, x)
    b = herglotz_wave(phi, 12.0, x, nodes=2 * 200)
    assert abs(a - b) < 1e-10 * abs(b)


def test_linearity():
    p1 = HerglotzDensity.fourier({1: 1.0, -2: 0.3})
    p2 = HerglotzDensity.fourier({0: 0.5j, 3: -1})
    al, be = 0.7 - 0.2j, -1.1
    x = np.array([[0.3, 0.4], [1.0, -2.0]])
    lhs = herglotz_wave(p1.scaled(al) + p2.scaled(be), 5.0, x)
    rhs = al * herglotz_wave(p1, 5.0, x) + be * herglotz_wave(p2, 5.0, x)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_rotated_and_reflected():
    phi = HerglotzDensity.fourier({2: 1 + 1j, -1: 0.5})
    assert phi.rotated(0.4)(1.0) == pytest.approx(phi(0.6), abs=1e-14)
    assert phi.conjugate_reflected()(0.7) == pytest.approx(phi(-0.7).conjugate(), abs=1e-14)
