"""Herglotz densities and the Herglotz wave.

``H[k, phi](x) = int_0^{2pi} phi(t) exp(i k (cos t, sin t) . x) dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import UnsupportedParameterError, ValidationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class HerglotzDensity:
    """Density on the unit circle stored as a finite Fourier series.

    ``phi(t) = sum_n c_n exp(i n t)``.  Tabulated samples are converted to
    their trigonometric interpolant on construction, so both representations
    evaluate through the same exact series.

    Attributes
    ----------
    coefficients : dict[int, complex]
        Nonzero Fourier coefficients.
    tabulated : bool
        True when built from samples; such densities carry no analyticity
        guarantee for downstream theorem checks.
    """

    coefficients: Mapping[int, complex] = field(default_factory=dict)
    tabulated: bool = False

    @classmethod
    def fourier(cls, coefficients: Mapping[int, complex]) -> "HerglotzDensity":
        coeffs = {}
        for n, c in coefficients.items():
            if int(n) != n:
                raise ValidationError(f"Fourier index {n!r} is not an integer")
            c = complex(c)
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValidationError("Fourier coefficients must be finite")
            if c != 0:
                coeffs[int(n)] = coeffs.get(int(n), 0) + c
        return cls(dict(sorted(coeffs.items())), False)

    @classmethod
    def constant(cls, value: complex = 1.0) -> "HerglotzDensity":
        return cls.fourier({0: value})

    @classmethod
    def zero(cls) -> "HerglotzDensity":
        return cls({}, False)

    @classmethod
    def from_samples(cls, samples: Sequence[complex]) -> "HerglotzDensity":
        """Trigonometric interpolant of samples at ``t_m = 2 pi m / M``.

        For even ``M`` the Nyquist mode is split evenly between ``+-M/2`` so
        the interpolant of real data stays real.
        """
        v = np.asarray(samples, dtype=complex)
        M = v.size
        if M < 16:
            raise ValidationError("tabulated densities need at least 16 samples")
        if not np.all(np.isfinite(v)):
            raise ValidationError("density samples must be finite")
        c = np.fft.fft(v) / M
        coeffs: dict[int, complex] = {}
        for m in range(M):
            n = m if m <= M // 2 else m - M
            val = complex(c[m])
            if M % 2 == 0 and m == M // 2:
                coeffs[n] = val / 2
                coeffs[-n] = val / 2
            else:
                coeffs[n] = val
        coeffs = {n: a for n, a in coeffs.items() if a != 0}
        return cls(dict(sorted(coeffs.items())), True)

    @property
    def bandwidth(self) -> int:
        return max((abs(n) for n in self.coefficients), default=0)

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    def __call__(self, theta) -> Any:
        t = np.asarray(theta, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for n, c in self.coefficients.items():
            out = out + c * np.exp(1j * n * t)
        return complex(out) if t.ndim == 0 else out

    def sup_norm(self, grid_size: int = 1024) -> float:
        t = np.linspace(0.0, TWO_PI, max(grid_size, 4 * self.bandwidth + 4), endpoint=False)
        return float(np.max(np.abs(self(t)))) if self.coefficients else 0.0

    def rotated(self, angle: float) -> "HerglotzDensity":
        """Density ``t -> phi(t - angle)``."""
        return HerglotzDensity(
            {n: c * complex(np.exp(-1j * n * angle)) for n, c in self.coefficients.items()},
            self.tabulated,
        )

    def conjugate_reflected(self) -> "HerglotzDensity":
        """Density ``t -> conj(phi(-t))``."""
        return HerglotzDensity(
            dict(sorted((n, c.conjugate()) for n, c in self.coefficients.items())), self.tabulated
        )

    def __add__(self, other: "HerglotzDensity") -> "HerglotzDensity":
        merged = dict(self.coefficients)
        for n, c in other.coefficients.items():
            merged[n] = merged.get(n, 0) + c
        return HerglotzDensity.fourier(merged)

    def scaled(self, alpha: complex) -> "HerglotzDensity":
        return HerglotzDensity.fourier({n: alpha * c for n, c in self.coefficients.items()})

    @property
    def analyticity(self) -> str:
        return "unknown" if self.tabulated else "analytic"

    def to_dict(self) -> dict[str, Any]:
        return {"fourier": [[n, c.real, c.imag] for n, c in self.coefficients.items()]}


def eval_density(phi: HerglotzDensity, theta_xi):
    """Value of the density at ``theta_xi`` (scalar or array)."""
    return phi(theta_xi)


def herglotz_nodes(k: float, radius: float, bandwidth: int = 0) -> int:
    """Trapezoid node count for the Herglotz integral at ``|x| = radius``."""
    return max(64, int(math.ceil(8.0 * k * radius)) + 2 * bandwidth + 32)


def herglotz_wave(phi: HerglotzDensity, k: float, x, nodes: int | None = None):
    """Herglotz wave ``H[k, phi](x)`` by the periodic trapezoid rule.

    Parameters
    ----------
    phi : HerglotzDensity
    k : float
        Wave number, must be positive.
    x : array_like
        A point (shape ``(2,)``) or stack of points (shape ``(..., 2)``).
    nodes : int, optional
        Override the automatic node count.
    """
    if not k > 0:
        raise UnsupportedParameterError("wave number must be positive")
    pts = np.asarray(x, dtype=float)
    if pts.shape[-1] != 2:
        raise ValidationError("points must have a trailing axis of length 2")
    r = float(np.max(np.hypot(pts[..., 0], pts[..., 1]))) if pts.size else 0.0
    M = nodes or herglotz_nodes(k, r, phi.bandwidth)
    t = np.arange(M) * (TWO_PI / M)
    w = phi(t) * (TWO_PI / M)
    phase = k * (pts[..., 0, None] * np.cos(t) + pts[..., 1, None] * np.sin(t))
    val = np.exp(1j * phase) @ w
    return complex(val) if pts.ndim == 1 else val


def helmholtz_residual(phi: HerglotzDensity, k: float, x, h: float) -> float:
    """``|Delta_h H + k^2 H|`` with the five-point Laplacian at ``x``."""
    if not 0 < h <= 0.1 / k:
        raise UnsupportedParameterError("step h must lie in (0, 0.1/k]")
    x0 = np.asarray(x, dtype=float)
    offs = np.array([[0, 0], [h, 0], [-h, 0], [0, h], [0, -h]], dtype=float)
    v = herglotz_wave(phi, k, x0 + offs)
    lap = (v[1] + v[2] + v[3] + v[4] - 4 * v[0]) / (h * h)
    return float(abs(lap + k * k * v[0]))
