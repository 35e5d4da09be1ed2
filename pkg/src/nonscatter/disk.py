"""Bessel functions and the non-scattering wave numbers of centred disks.

For the disk of radius ``R0`` and the density ``exp(-i n t)`` the incident
Herglotz wave is a multiple of ``J_n(k r) exp(-i n t)``.  It is
non-scattering exactly when an interior field ``c J_n(sqrt(q) k r)`` shares
its Cauchy data on ``r = R0``, i.e. when

``d_n(k) = sqrt(q) J_n'(sqrt(q) k R0) J_n(k R0) - J_n'(k R0) J_n(sqrt(q) k R0)``

vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError, UnsupportedParameterError, ValidationError

MAX_ORDER = 200
MAX_ARGUMENT = 1.0e5
SERIES_LIMIT = 2.0
_RESCALE = 1.0e250


def _check(n: int, x) -> tuple[int, np.ndarray]:
    if int(n) != n or n < 0:
        raise ValidationError("Bessel order must be a non-negative integer")
    n = int(n)
    if n > MAX_ORDER:
        raise RangeError(f"Bessel order {n} exceeds {MAX_ORDER}")
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0):
        raise ValidationError("Bessel argument must be finite and non-negative")
    if np.any(xa > MAX_ARGUMENT):
        raise RangeError(f"Bessel argument exceeds {MAX_ARGUMENT:g}")
    return n, xa


def _series(n: int, x: np.ndarray) -> np.ndarray:
    """Ascending series; used only for ``x <= 2`` where it does not cancel."""
    h = 0.25 * x * x
    term = np.ones_like(x)
    for m in range(1, n + 1):
        term = term * (0.5 * x) / m
    total = term.copy()
    for m in range(1, 60):
        term = -term * h / (m * (m + n))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _miller(orders: tuple[int, ...], x: np.ndarray) -> dict[int, np.ndarray]:
    """Backward recurrence normalised by ``1 = J_0 + 2 sum J_2k``.

    Returns ``J_m(x)`` for every requested order ``m``.
    """
    top = max(max(orders), float(np.max(x)))
    start = 2 * int((top + 30 + 3.0 * math.sqrt(top)) / 2 + 1)
    jp1 = np.zeros_like(x)
    jk = np.full_like(x, 1e-300)
    norm = np.zeros_like(x)
    saved = {m: np.zeros_like(x) for m in orders}
    for k in range(start, 0, -1):
        jm1 = (2.0 * k / x) * jk - jp1
        jp1, jk = jk, jm1
        # jk now holds J_{k-1}
        if k - 1 in saved:
            saved[k - 1] = jk.copy()
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm = norm + 2.0 * jk
        big = np.abs(jk) > _RESCALE
        if np.any(big):
            f = np.where(big, 1.0 / _RESCALE, 1.0)
            jk, jp1, norm = jk * f, jp1 * f, norm * f
            for m in saved:
                if m >= k - 1:
                    saved[m] = saved[m] * f
    norm = norm + jk
    return {m: v / norm for m, v in saved.items()}


def _bessel_many(orders: tuple[int, ...], x: np.ndarray) -> dict[int, np.ndarray]:
    out = {m: np.zeros_like(x) for m in orders}
    small = x <= SERIES_LIMIT
    if np.any(small):
        for m in orders:
            out[m][small] = _series(m, x[small])
    if np.any(~small):
        big = _miller(orders, x[~small])
        for m in orders:
            out[m][~small] = big[m]
    return out


def bessel_j(n: int, x):
    """Bessel function of the first kind ``J_n(x)`` for ``x >= 0``.

    Raises
    ------
    RangeError
        For ``n > 200`` or ``x > 1e5``.
    """
    n, xa = _check(n, x)
    flat = np.atleast_1d(xa).astype(float).ravel()
    val = _bessel_many((n,), flat)[n].reshape(xa.shape)
    return float(val) if xa.ndim == 0 else val


def bessel_j_prime(n: int, x):
    """``J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2`` with ``J_0' = -J_1``."""
    n, xa = _check(n, x)
    if n + 1 > MAX_ORDER + 1:
        raise RangeError("order too large")
    flat = np.atleast_1d(xa).astype(float).ravel()
    if n == 0:
        vals = _bessel_many((1,), flat)
        d = -vals[1]
    else:
        vals = _bessel_many((n - 1, n + 1), flat)
        d = 0.5 * (vals[n - 1] - vals[n + 1])
    d = d.reshape(xa.shape)
    return float(d) if xa.ndim == 0 else d


def _disk_check(q: float, R0: float) -> None:
    if not (q > 0 and q != 1):
        raise UnsupportedParameterError("q must be positive and different from 1")
    if not R0 > 0:
        raise UnsupportedParameterError("R0 must be positive")


def nonscattering_determinant(n: int, q: float, R0: float, k):
    """Cauchy-data determinant ``d_n(k)``; vectorised over ``k``."""
    _disk_check(q, R0)
    ka = np.asarray(k, dtype=float)
    if np.any(ka <= 0):
        raise UnsupportedParameterError("wave number must be positive")
    n = abs(int(n))
    sq = math.sqrt(q)
    x_out, x_in = ka * R0, sq * ka * R0
    d = sq * bessel_j_prime(n, x_in) * bessel_j(n, x_out) - bessel_j_prime(n, x_out) * bessel_j(n, x_in)
    return float(d) if ka.ndim == 0 else np.asarray(d)


@dataclass(frozen=True)
class WaveNumberRoot:
    n: int
    k: float
    residual: float
    bracket: tuple[float, float]

    def to_dict(self) -> dict:
        return {"n": self.n, "k": self.k, "residual": self.residual, "bracket": list(self.bracket)}


def scan_step(q: float, R0: float) -> float:
    """Scan spacing ``0.01 * 2 pi / (sqrt(q) R0)``."""
    return 0.01 * 2.0 * math.pi / (math.sqrt(q) * R0)


def wavenumber_sequence(
    n: int, q: float, R0: float, k_max: float, step: float | None = None, tol: float = 1e-12
) -> list[WaveNumberRoot]:
    """All sign changes of ``d_n`` on ``(0, k_max]``, bisected to ``tol``."""
    _disk_check(q, R0)
    if not 0 < k_max <= 500:
        raise UnsupportedParameterError("k_max must lie in (0, 500]")
    h = step or scan_step(q, R0)
    grid = np.arange(1, int(math.floor(k_max / h)) + 1) * h
    if grid.size == 0 or grid[-1] < k_max:
        grid = np.append(grid, k_max)
    vals = nonscattering_determinant(n, q, R0, grid)
    exact = np.flatnonzero(vals == 0)
    idx = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    lo, hi = grid[idx].copy(), grid[idx + 1].copy()
    flo = vals[idx].copy()
    lo0, hi0 = lo.copy(), hi.copy()
    while lo.size and np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        fm = nonscattering_determinant(n, q, R0, mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
        if np.all(hi - lo <= 2.0 * np.spacing(hi)):
            break
    roots = [0.5 * (a + b) for a, b in zip(lo, hi)]
    brackets = list(zip(lo0, hi0))
    for i in exact:
        roots.append(float(grid[i]))
        brackets.append((float(grid[i]), float(grid[i])))
    res = nonscattering_determinant(n, q, R0, np.array(roots)) if roots else []
    out = [
        WaveNumberRoot(abs(int(n)), float(r), float(abs(d)), (float(a), float(b)))
        for r, d, (a, b) in zip(roots, res, brackets)
    ]
    return sorted(out, key=lambda w: w.k)


def transmission_residual(n: int, q: float, R0: float, k: float) -> float:
    """``sigma_min / sigma_max`` of the 2x2 Cauchy-data matching matrix."""
    _disk_check(q, R0)
    if not k > 0:
        raise UnsupportedParameterError("wave number must be positive")
    n = abs(int(n))
    sq = math.sqrt(q)
    xo, xi = k * R0, sq * k * R0
    M = np.array([
        [bessel_j(n, xi), -bessel_j(n, xo)],
        [sq * bessel_j_prime(n, xi), -bessel_j_prime(n, xo)],
    ])
    s = np.linalg.svd(M, compute_uv=False)
    return float(s[1] / s[0]) if s[0] > 0 else 0.0
