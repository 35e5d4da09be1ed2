"""Brute-force quadrature of the non-scattering integral.

``I(k; eta) = int_0^{2pi} int_0^{2pi} Psi phi(theta_xi) exp(i k psi)
dtheta_xi dtheta`` with ``psi = (sqrt(q) eta + xi) . y`` and
``Psi = -(sqrt(q) eta - xi) . y'^perp``.

The double sum factorises: with
``A(theta) = sum_xi w phi exp(i k xi . y)`` and
``B(theta) = sum_xi w xi phi exp(i k xi . y)`` one has
``I = sum_theta w exp(i k sqrt(q) eta . y) (-sqrt(q) (eta . y'^perp) A + y'^perp . B)``,
so the cost of additional observation directions is linear in the number
of boundary nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .density import HerglotzDensity
from .errors import AliasingError, UnsupportedParameterError, ValidationError
from .geometry import RadiusFunction, boundary_jet

TWO_PI = 2.0 * math.pi
CONVERGENCE_TOL = 1e-8
_CHUNK = 1 << 21


def _even(n: int) -> int:
    return n + (n % 2)


@dataclass(frozen=True)
class QuadratureSpec:
    """Node rule ``max(min_nodes, ceil(nodes_per_wavelength * k * diameter))``.

    Explicit ``nodes_theta`` / ``nodes_xi`` override the rule.  Counts are
    rounded up to even numbers so the half-resolution subgrid exists.
    """

    min_nodes: int = 64
    nodes_per_wavelength: float = 10.0
    nodes_theta: int | None = None
    nodes_xi: int | None = None

    def __post_init__(self):
        if self.min_nodes < 64:
            raise ValidationError("min_nodes must be at least 64")
        if not self.nodes_per_wavelength > 0:
            raise ValidationError("nodes_per_wavelength must be positive")
        for n in (self.nodes_theta, self.nodes_xi):
            if n is not None and (n < 64 or n % 2):
                raise ValidationError("explicit node counts must be even and >= 64")

    def counts(self, k: float, diameter: float) -> tuple[int, int]:
        rule = _even(max(self.min_nodes, int(math.ceil(self.nodes_per_wavelength * k * diameter))))
        return (self.nodes_theta or rule, self.nodes_xi or rule)


@dataclass(frozen=True)
class IntegralResult:
    """Quadrature value with its self-check.

    ``error`` is the change against the half-resolution subgrid and
    ``scale`` bounds the integral by the integral of the absolute integrand.
    """

    value: complex
    converged: bool
    error: float
    scale: float
    nodes: tuple[int, int]

    def __complex__(self) -> complex:
        return self.value


def _check_inputs(q: float, k: float) -> None:
    if not q > 1:
        raise UnsupportedParameterError("only q > 1 is supported")
    if not k > 0:
        raise UnsupportedParameterError("wave number must be positive")


def _factor_sums(jet_y, phi_w, xi, k):
    """``A`` and ``B`` on the boundary nodes, chunked to bound memory."""
    nt, nx = jet_y.shape[0], xi.shape[0]
    A = np.empty(nt, dtype=complex)
    B = np.empty((nt, 2), dtype=complex)
    step = max(1, _CHUNK // nx)
    for s in range(0, nt, step):
        E = np.exp(1j * k * (jet_y[s:s + step] @ xi.T)) * phi_w
        A[s:s + step] = E.sum(axis=1)
        B[s:s + step] = E @ xi
    return A, B


def _assemble(y, y1p, A, B, wt, eta_theta, k, sq, derivative=False):
    """Sum over boundary nodes for every direction in ``eta_theta``."""
    e = np.atleast_1d(np.asarray(eta_theta, dtype=float))
    eta = np.stack([np.cos(e), np.sin(e)], axis=-1)
    eta_p = np.stack([-np.sin(e), np.cos(e)], axis=-1)
    carrier = np.exp(1j * k * sq * (eta @ y.T))
    ey1p = eta @ y1p.T
    inner = -sq * ey1p * A + (y1p[:, 0] * B[:, 0] + y1p[:, 1] * B[:, 1])
    if derivative:
        y1 = np.stack([y1p[:, 1], -y1p[:, 0]], axis=-1)
        inner = 1j * k * sq * (eta_p @ y.T) * inner - sq * (eta @ y1.T) * A
    return (carrier * inner) @ wt


def _boundary(rf, n):
    t = np.arange(n) * (TWO_PI / n)
    jet = boundary_jet(rf, t)
    y1p = np.stack([-jet.y1[:, 1], jet.y1[:, 0]], axis=-1)
    return jet.y, y1p


def _integral_grid(rf, q, phi, etas, k, spec, derivative=False):
    _check_inputs(q, k)
    spec = spec or QuadratureSpec()
    sq = math.sqrt(q)
    nt, nx = spec.counts(k, 2.0 * rf.max_radius())
    y, y1p = _boundary(rf, nt)
    tx = np.arange(nx) * (TWO_PI / nx)
    xi = np.stack([np.cos(tx), np.sin(tx)], axis=-1)
    phv = phi(tx)
    scale = (sq + 1) * float(np.sum(np.hypot(y1p[:, 0], y1p[:, 1]))) * TWO_PI / nt
    scale *= float(np.sum(np.abs(phv))) * TWO_PI / nx
    if derivative:
        scale *= 1.0 + k * sq * rf.max_radius()
    m = np.atleast_1d(np.asarray(etas, dtype=float)).size
    if phi.is_zero:
        return np.zeros(m, dtype=complex), np.zeros(m), scale, (nt, nx)
    A, B = _factor_sums(y, phv * (TWO_PI / nx), xi, k)
    A2, B2 = _factor_sums(y[::2], phv[::2] * (2 * TWO_PI / nx), xi[::2], k)
    wt = np.full(nt, TWO_PI / nt)
    full = _assemble(y, y1p, A, B, wt, etas, k, sq, derivative)
    half = _assemble(y[::2], y1p[::2], A2, B2, 2 * wt[::2], etas, k, sq, derivative)
    return full, np.abs(full - half), scale, (nt, nx)


def integral_I(
    rf: RadiusFunction, q: float, phi: HerglotzDensity, eta_theta: float, k: float,
    spec: QuadratureSpec | None = None,
) -> IntegralResult:
    """Tensor periodic trapezoid rule with a half-grid self-check.

    ``converged`` is False when the full and half grids differ by more than
    ``1e-8 * scale``; this is reported, never raised.
    """
    vals, errs, scale, nodes = _integral_grid(rf, q, phi, [eta_theta], k, spec)
    err = float(errs[0])
    return IntegralResult(complex(vals[0]), err <= CONVERGENCE_TOL * scale, err, scale, nodes)


def integral_I_many(
    rf: RadiusFunction, q: float, phi: HerglotzDensity, eta_thetas: Sequence[float], k: float,
    spec: QuadratureSpec | None = None,
) -> list[IntegralResult]:
    """Same as :func:`integral_I` for many directions sharing one ``k``."""
    vals, errs, scale, nodes = _integral_grid(rf, q, phi, eta_thetas, k, spec)
    return [
        IntegralResult(complex(v), float(e) <= CONVERGENCE_TOL * scale, float(e), scale, nodes)
        for v, e in zip(vals, errs)
    ]


def integral_I1_explicit(
    rf: RadiusFunction, q: float, phi: HerglotzDensity, eta_thetas, k: float,
    spec: QuadratureSpec | None = None,
) -> np.ndarray:
    """First ``theta_eta`` derivative from the differentiated integrand.

    ``(i k sqrt(q) eta^perp . y Psi - sqrt(q) eta . y') phi exp(i k psi)``.
    """
    vals, _, _, _ = _integral_grid(rf, q, phi, eta_thetas, k, spec, derivative=True)
    return vals


# ------------------------------------------------------------ area form
def _radial_nodes(k: float, q: float, rmax: float) -> int:
    return int(math.ceil(0.6 * k * (math.sqrt(q) + 1) * rmax)) + 24


def _area_sum(rf, q, phi, eta_theta, k, nt, nx, nr):
    sq = math.sqrt(q)
    t = np.arange(nt) * (TWO_PI / nt)
    rho = np.asarray(rf(t))
    gx, gw = np.polynomial.legendre.leggauss(nr)
    r, wr = 0.5 * (gx + 1), 0.5 * gw
    tx = np.arange(nx) * (TWO_PI / nx)
    phw = phi(tx) * (TWO_PI / nx)
    eta = np.array([math.cos(eta_theta), math.sin(eta_theta)])
    total = 0.0 + 0.0j
    step = max(1, _CHUNK // (nx * nr))
    for s in range(0, nt, step):
        ts, rs = t[s:s + step], rho[s:s + step]
        cosd = np.cos(ts[:, None] - tx[None, :])
        radial = (rs[:, None] * r[None, :])
        H = np.exp(1j * k * radial[:, :, None] * cosd[:, None, :]) @ phw
        proj = np.cos(ts) * eta[0] + np.sin(ts) * eta[1]
        carrier = np.exp(1j * k * sq * radial * proj[:, None])
        jac = radial * rs[:, None]
        total += np.sum(carrier * H * jac * wr[None, :])
    return total * (TWO_PI / nt)


def integral_area(
    rf: RadiusFunction, q: float, phi: HerglotzDensity, eta_theta: float, k: float,
    spec: QuadratureSpec | None = None,
) -> IntegralResult:
    """Domain form ``i (q - 1) k int_Omega exp(i k sqrt(q) eta . x) H[k, phi](x) dx``.

    Polar coordinates ``x = r rho(theta) (cos theta, sin theta)`` with
    Gauss-Legendre in ``r`` and the trapezoid rule in ``theta``.  The
    self-check repeats the sum with a quarter more radial nodes.  The
    prefactor makes the value equal to :func:`integral_I`.
    """
    _check_inputs(q, k)
    spec = spec or QuadratureSpec()
    rmax = rf.max_radius()
    nt, nx = spec.counts(k, 2.0 * rmax)
    nr = _radial_nodes(k, q, rmax)
    pref = 1j * (q - 1) * k
    scale = abs(pref) * 0.5 * TWO_PI * rmax**2 * phi.sup_norm() * TWO_PI
    if phi.is_zero:
        return IntegralResult(0j, True, 0.0, scale, (nt, nx))
    full = pref * _area_sum(rf, q, phi, eta_theta, k, nt, nx, nr)
    check = pref * _area_sum(rf, q, phi, eta_theta, k, nt, nx, nr + max(8, nr // 4))
    err = abs(full - check)
    return IntegralResult(complex(full), err <= CONVERGENCE_TOL * scale, err, scale, (nt, nx))


def integral_circle_closed_form(R: float, q: float, phi: HerglotzDensity, eta_theta: float, k: float,
                                nodes: int | None = None) -> complex:
    """Disk of radius ``R``: radial integral done exactly by ``J_1``.

    ``i (q - 1) k int phi(xi) 2 pi R J_1(k R |v|) / (k |v|) dtheta_xi`` with
    ``v = sqrt(q) eta + xi``.
    """
    from .disk import bessel_j

    _check_inputs(q, k)
    sq = math.sqrt(q)
    M = nodes or _even(max(128, int(math.ceil(4 * k * R * (sq + 1))) + 64))
    tx = np.arange(M) * (TWO_PI / M)
    v = np.stack([sq * math.cos(eta_theta) + np.cos(tx), sq * math.sin(eta_theta) + np.sin(tx)], axis=-1)
    nv = np.hypot(v[:, 0], v[:, 1])
    radial = TWO_PI * R * bessel_j(1, k * R * nv) / (k * nv)
    return complex(1j * (q - 1) * k * np.sum(phi(tx) * radial) * (TWO_PI / M))


# ---------------------------------------------------------- derivatives
def eta_grid_size(rf: RadiusFunction, q: float, k: float, N: int = 0) -> int:
    """Even grid size resolving the ``theta_eta`` bandwidth of ``I``."""
    B = k * math.sqrt(q) * rf.max_radius()
    M = 2 * int(math.ceil(4.0 / 3.0 * (B + 12 * B ** (1 / 3) + 20)))
    return _even(max(M, 64, 4 * (N + 1)))


@dataclass(frozen=True)
class DerivativeGrid:
    eta: np.ndarray
    values: np.ndarray
    N: int
    tail_fraction: float


def integral_I_N(
    rf: RadiusFunction, q: float, phi: HerglotzDensity, eta_grid_values, k: float, N: int,
    spec: QuadratureSpec | None = None, tail_tol: float = 1e-8,
) -> DerivativeGrid:
    """``N``-th ``theta_eta`` derivative of ``I`` on an equispaced grid.

    ``eta_grid_values`` is either a grid size or the equispaced grid itself
    (starting anywhere, spacing ``2 pi / M``).  Differentiation is spectral.

    Raises
    ------
    AliasingError
        When the Fourier energy in ``|m| >= 3M/8`` exceeds ``tail_tol``.
    """
    if N < 0:
        raise ValidationError("N must be non-negative")
    if np.ndim(eta_grid_values) == 0:
        M = int(eta_grid_values)
        eta = np.arange(M) * (TWO_PI / M)
    else:
        eta = np.asarray(eta_grid_values, dtype=float)
        M = eta.size
        if M > 1 and not np.allclose(np.diff(eta), TWO_PI / M, rtol=0, atol=1e-12):
            raise ValidationError("eta grid must be equispaced over a full period")
    if M < max(64, 4 * (N + 1)) or M % 2:
        raise ValidationError("eta grid needs an even size >= max(64, 4(N+1))")
    vals, _, _, _ = _integral_grid(rf, q, phi, eta, k, spec)
    c = np.fft.fft(vals)
    m = np.fft.fftfreq(M, 1.0 / M)
    energy = float(np.sum(np.abs(c) ** 2))
    tail = float(np.sum(np.abs(c[np.abs(m) >= 3 * M / 8]) ** 2)) / energy if energy > 0 else 0.0
    if tail > tail_tol:
        raise AliasingError(f"spectral tail fraction {tail:.3e} exceeds {tail_tol:g}; refine the eta grid")
    if N == 0:
        return DerivativeGrid(eta, vals, 0, tail)
    mult = (1j * m) ** N
    mult[m == -M // 2] = 0.0
    # spectral coefficients are phase-referenced to eta[0]
    out = np.fft.ifft(c * mult)
    return DerivativeGrid(eta, out, N, tail)


def integral_I_N_at(
    rf: RadiusFunction, q: float, phi: HerglotzDensity, eta_thetas, k: float, N: int,
    spec: QuadratureSpec | None = None,
) -> np.ndarray:
    """``I^(N)`` at arbitrary directions via the trigonometric interpolant.

    The grid size comes from :func:`eta_grid_size`; ``N = 0`` evaluates the
    quadrature directly.
    """
    e = np.atleast_1d(np.asarray(eta_thetas, dtype=float))
    if N == 0:
        vals, _, _, _ = _integral_grid(rf, q, phi, e, k, spec)
        return vals
    M = eta_grid_size(rf, q, k, N)
    grid = integral_I_N(rf, q, phi, M, k, 0, spec)
    c = np.fft.fft(grid.values) / M
    m = np.fft.fftfreq(M, 1.0 / M)
    c[m == -M // 2] = 0.0
    return np.exp(1j * np.outer(e, m)) @ (c * (1j * m) ** N)
