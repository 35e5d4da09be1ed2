"""Stationary points of the boundary phase.

For an observation direction ``eta = (cos a, sin a)`` the phase is
``psi(t, s) = (sqrt(q) eta + xi(s)) . y(t)``.  On a star-shaped boundary the
stationary points come in four branches ``T_{j,l}``: ``xi = (-1)^(l-1) y/|y|``
and ``t`` solves ``(ln rho)'(t) = h(t - a_l)`` with ``a_l = a + (l-1) pi`` on
the branch interval selected by ``j``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    AdmissibilityError,
    BranchViolationError,
    DegenerateStationaryPointError,
    UnsupportedParameterError,
    ValidationError,
)
from .geometry import RadiusFunction, boundary_jet

TWO_PI = 2.0 * math.pi
SCAN_SUBDIVISIONS = 256
PAIRS = ((1, 1), (1, 2), (2, 1), (2, 2))


def normalize_angle(x):
    """Map angles to ``[0, 2 pi)``."""
    r = np.mod(x, TWO_PI)
    r = np.where(r >= TWO_PI, r - TWO_PI, r)
    return float(r) if np.ndim(r) == 0 else r


def wrap_pi(x):
    """Map angles to ``[-pi, pi)``."""
    return normalize_angle(np.asarray(x) + math.pi) - math.pi


def _check_q(q: float) -> float:
    if not q > 1:
        raise UnsupportedParameterError("only q > 1 is supported")
    return math.sqrt(q)


def _check_labels(j: int, l: int | None = None) -> None:
    if j not in (1, 2) or (l is not None and l not in (1, 2)):
        raise ValidationError("branch labels must be 1 or 2")


def theta_q(q: float) -> float:
    """``arccos(1/sqrt(q))``, the half-width parameter of the branches."""
    return math.acos(1.0 / _check_q(q))


def h_function(q: float, theta):
    """``h = sqrt(q) sin t / (sqrt(q) cos t + 1)`` and its derivative.

    Raises
    ------
    BranchViolationError
        If ``|sqrt(q) cos t + 1| < 1e-12`` (pole of ``h``).
    """
    sq = _check_q(q)
    t = np.asarray(theta, dtype=float)
    den = sq * np.cos(t) + 1.0
    if np.any(np.abs(den) < 1e-12):
        raise BranchViolationError("h evaluated at its pole")
    h = sq * np.sin(t) / den
    hp = sq * (sq + np.cos(t)) / den**2
    if t.ndim == 0:
        return float(h), float(hp)
    return h, hp


def branch_interval(q: float, j: int) -> tuple[float, float]:
    """Open interval of offsets ``t - a_l`` that belongs to branch ``j``."""
    _check_labels(j)
    tq = theta_q(q)
    return (tq - math.pi, math.pi - tq) if j == 1 else (math.pi - tq, math.pi + tq)


def _G(rf: RadiusFunction, sq: float, base, t):
    """Pole-free form ``(sqrt(q) cos t + 1) ln1(base + t) - sqrt(q) sin t``."""
    return (sq * np.cos(t) + 1.0) * rf.ln1(base + t) - sq * np.sin(t)


def _base(eta_theta, l: int):
    return normalize_angle(np.asarray(eta_theta, dtype=float) + (l - 1) * math.pi)


def _scan(rf: RadiusFunction, q: float, base: np.ndarray, j: int, n_sub: int):
    sq = math.sqrt(q)
    lo, hi = branch_interval(q, j)
    grid = np.linspace(lo, hi, n_sub + 1)
    G = _G(rf, sq, base[:, None], grid[None, :])
    s = np.sign(G)
    cross = s[:, :-1] * s[:, 1:] < 0
    exact = np.zeros_like(s, dtype=bool)
    exact[:, 1:-1] = s[:, 1:-1] == 0
    return grid, G, s, cross, exact


def _bisect(rf, sq, base, lo, hi, s_lo, iterations: int = 64):
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        gm = np.sign(_G(rf, sq, base, mid))
        same = gm == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
        hit = gm == 0
        lo = np.where(hit, mid, lo)
        hi = np.where(hit, mid, hi)
    return 0.5 * (lo + hi)


def branch_offset(rf: RadiusFunction, q: float, eta_theta, j: int, l: int, n_sub: int = SCAN_SUBDIVISIONS):
    """Offset ``t = T_{j,l}eta - a_l`` inside the branch interval.

    Found by a sign-change scan over ``n_sub`` cells followed by bisection
    to full double precision.

    Raises
    ------
    AdmissibilityError
        If some ``eta`` has no root or several roots on the branch.
    """
    _check_labels(j, l)
    sq = _check_q(q)
    eta = np.asarray(eta_theta, dtype=float)
    base = np.atleast_1d(_base(eta, l)).astype(float)
    grid, G, s, cross, exact = _scan(rf, q, base, j, n_sub)
    count = cross.sum(axis=1) + exact.sum(axis=1)
    bad = count != 1
    if np.any(bad):
        i = int(np.flatnonzero(bad)[0])
        raise AdmissibilityError(
            f"branch (j={j}, l={l}) has {int(count[i])} roots at theta_eta="
            f"{float(np.atleast_1d(eta)[i] if eta.ndim else eta)!r}; the radius function is not "
            "admissible for this q"
        )
    rows = np.arange(base.size)
    has_exact = exact.any(axis=1)
    exact_idx = np.argmax(exact, axis=1)
    cross_idx = np.argmax(cross, axis=1)
    lo = grid[cross_idx]
    hi = grid[cross_idx + 1]
    s_lo = s[rows, cross_idx]
    t = _bisect(rf, sq, base, lo, hi, s_lo)
    t = np.where(has_exact, grid[exact_idx], t)
    return float(t[0]) if eta.ndim == 0 else t


def branch_roots(rf: RadiusFunction, q: float, eta_theta: float, j: int, l: int, n_sub: int = SCAN_SUBDIVISIONS) -> list[float]:
    """Diagnostics: every root of the branch equation, labelled or not.

    Intended for non-admissible radius functions where the branch may carry
    several roots; returns normalized angles ``theta``.
    """
    _check_labels(j, l)
    sq = _check_q(q)
    base = np.atleast_1d(_base(eta_theta, l)).astype(float)
    grid, G, s, cross, exact = _scan(rf, q, base, j, n_sub)
    roots = [float(grid[i]) for i in np.flatnonzero(exact[0])]
    for i in np.flatnonzero(cross[0]):
        t = _bisect(rf, sq, base, np.array([grid[i]]), np.array([grid[i + 1]]), np.array([s[0, i]]))
        roots.append(float(t[0]))
    return sorted(normalize_angle(base[0] + r) for r in roots)


def solve_T(rf: RadiusFunction, q: float, eta_theta, j: int, l: int):
    """Polar angle ``T_{j,l} eta`` in ``[0, 2 pi)``.

    Examples
    --------
    >>> from nonscatter.geometry import RadiusFunction
    >>> solve_T(RadiusFunction.constant(), 4.0, 0.5, 2, 1)  # doctest: +ELLIPSIS
    3.64159...
    """
    t = branch_offset(rf, q, eta_theta, j, l)
    return normalize_angle(_base(eta_theta, l) + t)


def T_lift(rf: RadiusFunction, q: float, eta_theta, j: int, l: int):
    """Continuous lift ``a + (l-1) pi + t`` of ``T_{j,l}`` (not normalized)."""
    return np.asarray(eta_theta, dtype=float) + (l - 1) * math.pi + branch_offset(rf, q, eta_theta, j, l)


def _closed_forms(rf: RadiusFunction, q: float, theta, j: int):
    """``sqrt(q) cos t`` and ``sqrt(q) sin t`` implied by ``theta`` alone."""
    g = rf.ln1(theta)
    R = np.sqrt(q + (q - 1) * g * g)
    sgn = (-1) ** j
    c = (-g * g - sgn * R) / (1 + g * g)
    s = g * (1 - sgn * R) / (1 + g * g)
    return c, s, g, R


def T_derivative(rf: RadiusFunction, q: float, eta_theta, j: int, l: int):
    """``dT_{j,l}/d(theta_eta) = R / (R + (-1)^j (sqrt(q) cos t + 1) (ln rho)''``."""
    sq = _check_q(q)
    t = branch_offset(rf, q, eta_theta, j, l)
    theta = _base(eta_theta, l) + t
    g, g2 = rf.evaluate(theta)[3:]
    R = np.sqrt(q + (q - 1) * g * g)
    val = R / (R + (-1) ** j * (sq * np.cos(t) + 1) * g2)
    return float(val) if np.ndim(val) == 0 else val


def inverse_offset(rf: RadiusFunction, q: float, theta, j: int):
    """Offset ``t`` of branch ``j`` determined by the boundary angle alone."""
    _check_labels(j)
    c, s, _, _ = _closed_forms(rf, q, theta, j)
    t = np.arctan2(s, c)
    if j == 2:
        t = np.mod(t, TWO_PI)
    return float(t) if np.ndim(t) == 0 else t


def inverse_T(rf: RadiusFunction, q: float, theta, j: int, l: int):
    """``theta_eta`` with ``T_{j,l} eta = theta``, from the closed forms."""
    _check_labels(j, l)
    _check_q(q)
    return normalize_angle(np.asarray(theta, dtype=float) - (l - 1) * math.pi - inverse_offset(rf, q, theta, j))


def closed_form_residuals(rf: RadiusFunction, q: float, eta_theta, j: int, l: int):
    """Residuals of the closed-form cosine/sine identities at ``T_{j,l} eta``.

    Returns the three arrays ``sqrt(q) cos t - C``, ``sqrt(q) sin t - S`` and
    ``(C^2 + S^2)/q - 1``.
    """
    sq = _check_q(q)
    t = branch_offset(rf, q, eta_theta, j, l)
    theta = _base(eta_theta, l) + t
    c, s, _, _ = _closed_forms(rf, q, theta, j)
    return sq * np.cos(t) - c, sq * np.sin(t) - s, (c * c + s * s) / q - 1.0


# ----------------------------------------------------------- point data
@dataclass(frozen=True)
class StationaryPoint:
    """One simple stationary point of the phase."""

    theta: float
    theta_xi: float
    j: int
    l: int
    psi: float
    Psi: float
    hessian: np.ndarray
    det: float
    signature: int
    f: float
    eta_theta: float

    @property
    def label(self) -> tuple[int, int]:
        return (self.j, self.l)

    def to_dict(self) -> dict:
        return {
            "j": self.j,
            "l": self.l,
            "eta_theta": self.eta_theta,
            "theta": self.theta,
            "theta_xi": self.theta_xi,
            "psi": self.psi,
            "Psi": self.Psi,
            "det": self.det,
            "signature": self.signature,
            "f": self.f,
        }


def perp(v: np.ndarray) -> np.ndarray:
    """Rotation by +90 degrees: ``(x1, x2) -> (-x2, x1)``."""
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def signature_of(H: np.ndarray) -> int:
    ev = np.linalg.eigvalsh(H)
    return int(np.sum(ev > 0) - np.sum(ev < 0))


def _point_from_geometry(y, y1, y2, xi, eta_vec, sq, rho, j, l, theta, theta_xi, eta_theta, param_scale=1.0):
    psi = float((sq * eta_vec + xi) @ y)
    Psi = float(-(sq * eta_vec - xi) @ perp(y1))
    xp = perp(xi)
    H = np.array([[float((sq * eta_vec + xi) @ y2), float(xp @ y1)], [float(xp @ y1), float(-(xi @ y))]])
    det = float(np.linalg.det(H))
    if abs(det) < 1e-10 * rho * rho * param_scale:
        raise DegenerateStationaryPointError(
            f"degenerate stationary point (j={j}, l={l}) at theta_eta={eta_theta!r}: det={det!r}"
        )
    f = float(perp(eta_vec) @ y)
    return StationaryPoint(
        theta=float(theta),
        theta_xi=float(theta_xi),
        j=j,
        l=l,
        psi=psi,
        Psi=Psi,
        hessian=H,
        det=det,
        signature=signature_of(H),
        f=f,
        eta_theta=float(eta_theta),
    )


def stationary_point(rf: RadiusFunction, q: float, eta_theta: float, j: int, l: int) -> StationaryPoint:
    """The stationary point on branch ``(j, l)``.

    The weight ``f`` is evaluated as ``rho(T) sin(T - theta_eta)``.
    """
    sq = _check_q(q)
    eta_theta = float(eta_theta)
    theta = solve_T(rf, q, eta_theta, j, l)
    jet = boundary_jet(rf, theta)
    xi = (-1) ** (l - 1) * np.array([math.cos(theta), math.sin(theta)])
    eta_vec = np.array([math.cos(eta_theta), math.sin(eta_theta)])
    theta_xi = normalize_angle(theta + (l - 1) * math.pi)
    pt = _point_from_geometry(jet.y, jet.y1, jet.y2, xi, eta_vec, sq, jet.rho, j, l, theta, theta_xi, eta_theta)
    f = jet.rho * math.sin(theta - eta_theta)
    return StationaryPoint(**{**pt.__dict__, "f": float(f)})


def stationary_set(rf: RadiusFunction, q: float, eta_theta: float) -> list[StationaryPoint]:
    """All four stationary points, ordered ``(1,1), (1,2), (2,1), (2,2)``."""
    return [stationary_point(rf, q, eta_theta, j, l) for j, l in PAIRS]


def stationarity_residuals(rf: RadiusFunction, q: float, pt: StationaryPoint) -> tuple[float, float]:
    """``|(sqrt(q) eta + xi) . y'|`` and ``|xi_perp . y|`` at a point."""
    jet = boundary_jet(rf, pt.theta)
    xi = np.array([math.cos(pt.theta_xi), math.sin(pt.theta_xi)])
    eta = np.array([math.cos(pt.eta_theta), math.sin(pt.eta_theta)])
    return abs(float((math.sqrt(q) * eta + xi) @ jet.y1)), abs(float(perp(xi) @ jet.y))


def star_hessian_closed_form(rf: RadiusFunction, q: float, pt: StationaryPoint) -> np.ndarray:
    """Hessian at a star-shaped stationary point written through ``ln rho``."""
    sq = math.sqrt(q)
    rho, _, _, g, g2 = (float(v) for v in rf.evaluate(pt.theta))
    eta_l = (-1) ** (pt.l - 1) * np.array([math.cos(pt.eta_theta), math.sin(pt.eta_theta)])
    c = float(np.array([math.cos(pt.theta), math.sin(pt.theta)]) @ eta_l) * sq + 1.0
    M = np.array([[(1 + g * g - g2) * c, -1.0], [-1.0, 1.0]])
    return -((-1) ** (pt.l - 1)) * rho * M


def expected_signs(j: int, l: int) -> tuple[int, int, int]:
    """Sign of ``Psi`` (and ``psi``), sign of ``det`` and the signature."""
    return (-1) ** (l + j), (-1) ** (j - 1), (-1) ** l - (-1) ** (l + j)


# ------------------------------------------------------------- ellipse
def _ellipse_check(a: float, b: float, q: float) -> float:
    sq = _check_q(q)
    if not (a > 0 and b > 0):
        raise UnsupportedParameterError("ellipse semi-axes must be positive")
    s2 = (b / a) ** 2
    if s2 > 1:
        raise UnsupportedParameterError("ellipse maps expect a >= b (major axis along x)")
    if not s2 > 1.0 / (1.0 + sq):
        raise UnsupportedParameterError("ellipse maps need s^2 > 1/(1 + sqrt(q))")
    return s2


def _ellipse_F(s2, sq, eta1, eta2, x):
    x1, x2 = np.cos(x), np.sin(x)
    return sq * (eta1 * x2 - s2 * eta2 * x1) + (1 - s2) * x1 * x2


def ellipse_T(a: float, b: float, q: float, eta_theta, j: int):
    """Direction angle ``T_j theta_eta`` of ``xi`` for the centred ellipse.

    ``T_1`` lies in the closed quadrant of ``theta_eta`` and ``T_2`` in the
    quadrant of ``theta_eta + pi``; on the axes ``T_1 = theta_eta`` and
    ``T_2 = theta_eta + pi`` exactly.
    """
    _check_labels(j)
    s2 = _ellipse_check(a, b, q)
    sq = math.sqrt(q)
    eta = normalize_angle(np.asarray(eta_theta, dtype=float))
    eta1d = np.atleast_1d(eta).astype(float)
    target = normalize_angle(eta1d + (j - 1) * math.pi)
    quad = np.floor(target / (math.pi / 2))
    on_axis = np.isclose(np.mod(eta1d, math.pi / 2), 0.0, atol=0.0) | (eta1d == 0)
    lo = quad * (math.pi / 2)
    hi = lo + math.pi / 2
    e1, e2 = np.cos(eta1d), np.sin(eta1d)
    f_lo = _ellipse_F(s2, sq, e1, e2, lo)
    s_lo = np.sign(f_lo)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        fm = np.sign(_ellipse_F(s2, sq, e1, e2, mid))
        same = fm == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    out = np.where(on_axis, target, 0.5 * (lo + hi))
    out = normalize_angle(out)
    return float(out[0]) if np.ndim(eta) == 0 else out


def ellipse_T_derivative(a: float, b: float, q: float, eta_theta: float, j: int) -> float:
    """``dT_j/d theta_eta``; uses the explicit limits on the axes."""
    s2 = _ellipse_check(a, b, q)
    sq = math.sqrt(q)
    eta = normalize_angle(float(eta_theta))
    sgn = (-1) ** (j - 1)
    if eta % (math.pi / 2) == 0:
        if eta % math.pi == 0:
            return s2 * sq / (sq + sgn * (1 - s2))
        return sq / (s2 * sq - sgn * (1 - s2))
    x = ellipse_T(a, b, q, eta, j)
    e1, e2 = math.cos(eta), math.sin(eta)
    x1, x2 = math.cos(x), math.sin(x)
    return sq * (s2 * e1 * x1 + e2 * x2) / (sq * (e1 * x1 + s2 * e2 * x2) + (1 - s2) * (x1 * x1 - x2 * x2))


def ellipse_T_inverse(a: float, b: float, q: float, theta_xi: float, j: int) -> float:
    """``theta_eta`` with ``T_j theta_eta = theta_xi``."""
    s2 = _ellipse_check(a, b, q)
    sq = math.sqrt(q)
    x1, x2 = math.cos(theta_xi), math.sin(theta_xi)
    A = math.hypot(x2, s2 * x1)
    beta = math.atan2(s2 * x1, x2)
    c = -(1 - s2) * x1 * x2 / sq
    base = math.acos(max(-1.0, min(1.0, c / A)))
    best, err = None, math.inf
    for cand in (-beta + base, -beta - base):
        cand = normalize_angle(cand)
        back = ellipse_T(a, b, q, cand, j)
        e = abs(wrap_pi(back - theta_xi))
        if e < err:
            best, err = cand, e
    return float(best)


def ellipse_stationary_set(a: float, b: float, q: float, eta_theta: float) -> list[StationaryPoint]:
    """Four stationary points in the parametrization ``(a cos t, b sin t)``.

    Labels follow the star-shaped convention: ``(j, 1)`` is the point
    ``(T_{j,s}, T_j)`` and ``(j, 2)`` the point ``(T_{j,s} + pi, T_j)``.  The
    ``theta`` field holds the parameter ``t``, not the polar angle.
    """
    _ellipse_check(a, b, q)
    sq = math.sqrt(q)
    s = b / a
    eta_theta = float(eta_theta)
    eta_vec = np.array([math.cos(eta_theta), math.sin(eta_theta)])
    out = []
    for j, l in PAIRS:
        Tj = ellipse_T(a, b, q, eta_theta, j)
        ts = math.atan2(math.sin(Tj), s * math.cos(Tj)) + (l - 1) * math.pi
        ts = normalize_angle(ts)
        y = np.array([a * math.cos(ts), b * math.sin(ts)])
        y1 = np.array([-a * math.sin(ts), b * math.cos(ts)])
        y2 = -y
        xi = np.array([math.cos(Tj), math.sin(Tj)])
        scale = min(a, b) ** 2 / max(a, b) ** 2
        out.append(_point_from_geometry(y, y1, y2, xi, eta_vec, sq, float(np.hypot(*y)), j, l, ts, Tj, eta_theta, scale))
    return out


# ------------------------------------------------------------ iteration
_STAR_TOKEN = re.compile(r"^T([12])([12])(\^-1)?$")
_ELL_TOKEN = re.compile(r"^T([12])(\^-1)?$")


@dataclass(frozen=True)
class MapSpec:
    """A composition word over branch maps and half-turn shifts.

    The word is written left to right like an operator product and applied
    right to left.  Star tokens: ``T11``, ``T12^-1``, ...; ellipse tokens:
    ``T1``, ``T2^-1``; both flavours accept ``+pi`` and ``-pi``.
    """

    tokens: tuple[str, ...]
    q: float
    rf: RadiusFunction | None = None
    ellipse: tuple[float, float] | None = None
    confine: tuple[float, float] | None = None

    @classmethod
    def parse(
        cls,
        word: str | Sequence[str],
        q: float,
        rf: RadiusFunction | None = None,
        ellipse: tuple[float, float] | None = None,
        confine: tuple[float, float] | None = None,
    ) -> "MapSpec":
        toks = word.replace("*", " ").split() if isinstance(word, str) else list(word)
        if (rf is None) == (ellipse is None):
            raise ValidationError("give exactly one of a radius function or ellipse axes")
        pat = _STAR_TOKEN if rf is not None else _ELL_TOKEN
        for tok in toks:
            if tok not in ("+pi", "-pi") and not pat.match(tok):
                raise ValidationError(f"unknown map token {tok!r}")
        if not toks:
            raise ValidationError("empty map word")
        if ellipse is not None:
            _ellipse_check(ellipse[0], ellipse[1], q)
        return cls(tuple(toks), float(q), rf, tuple(ellipse) if ellipse else None, confine)

    def _apply_token(self, tok: str, x: float) -> float:
        if tok == "+pi":
            return x + math.pi
        if tok == "-pi":
            return x - math.pi
        a = normalize_angle(x)
        if self.rf is not None:
            m = _STAR_TOKEN.match(tok)
            j, l, inv = int(m.group(1)), int(m.group(2)), bool(m.group(3))
            if inv:
                return x - (l - 1) * math.pi - inverse_offset(self.rf, self.q, a, j)
            return x + (l - 1) * math.pi + branch_offset(self.rf, self.q, a, j, l)
        m = _ELL_TOKEN.match(tok)
        j, inv = int(m.group(1)), bool(m.group(2))
        A, B = self.ellipse
        if inv:
            # subtract the forward offset evaluated at the preimage
            pre = ellipse_T_inverse(A, B, self.q, a, j)
            d = a - pre
        else:
            d = ellipse_T(A, B, self.q, a, j) - a
        d = wrap_pi(d) if j == 1 else normalize_angle(d)
        return x - d if inv else x + d

    def apply(self, x: float) -> float:
        for tok in reversed(self.tokens):
            try:
                x = self._apply_token(tok, x)
            except AdmissibilityError as exc:
                raise BranchViolationError(f"map {tok} left the admissible branch: {exc}") from exc
        return float(x)


@dataclass(frozen=True)
class Orbit:
    """Orbit of ``t0`` under repeated application of a map word."""

    lifted: tuple[float, ...]
    normalized: tuple[float, ...]
    increasing: tuple[bool, ...]
    confined: tuple[bool, ...]

    def rows(self):
        for i, (x, n) in enumerate(zip(self.lifted, self.normalized)):
            inc = self.increasing[i - 1] if i else None
            yield {"step": i, "lifted": x, "normalized": n, "increasing": inc, "confined": self.confined[i]}


def compose_iterate(map_spec: MapSpec, t0: float, n_steps: int) -> Orbit:
    """Iterate the composed map; flags compare consecutive lifted values."""
    if n_steps < 0:
        raise ValidationError("n_steps must be non-negative")
    xs = [float(t0)]
    for _ in range(n_steps):
        xs.append(map_spec.apply(xs[-1]))
    norm = [normalize_angle(x) for x in xs]
    inc = tuple(b > a for a, b in zip(xs, xs[1:]))
    if map_spec.confine is None:
        conf = tuple(True for _ in xs)
    else:
        lo, hi = map_spec.confine
        conf = tuple(lo <= v <= hi for v in norm)
    return Orbit(tuple(xs), tuple(norm), inc, conf)
