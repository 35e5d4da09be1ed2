"""Star-shaped domains described by a radius function.

A boundary is ``y(t) = rho(t) (cos t, sin t)``.  Every kind of radius
function is evaluated from an exact closed form together with its first two
derivatives, so that ``(ln rho)''`` (the quantity entering the admissibility
condition) is never obtained by numerical differentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Sequence

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from .errors import EvaluationError, InvalidDomainError, UnsupportedParameterError

TWO_PI = 2.0 * math.pi

KINDS = (
    "constant",
    "centered_ellipse",
    "offset_disk",
    "focal_ellipse",
    "log_fourier",
    "piecewise_egg",
)

THEOREM_KEYS = (
    "Thm-ellipse",
    "Thm-disk",
    "Thm-focal",
    "Star1-cond",
    "Main1-(i)",
    "Main1-(ii)",
    "Anly-(i)",
    "Anly-(ii)",
)


def admissibility_bound(q: float) -> float:
    """Upper bound ``sqrt(q)/(1+sqrt(q))`` on ``(ln rho)''``."""
    sq = math.sqrt(q)
    return sq / (1.0 + sq)


@dataclass(frozen=True, eq=False)
class RadiusFunction:
    """Radius function of a domain that is star-shaped about the origin.

    Use the named constructors (:meth:`constant`, :meth:`centered_ellipse`,
    ...) rather than the raw initializer; they validate the parameters.

    Parameters
    ----------
    kind : str
        One of :data:`KINDS`.
    params : dict
        Kind-specific parameters (see the constructors).
    rotation : float
        The whole domain is rotated counter-clockwise by this angle, i.e.
        ``rho(t) = rho_0(t - rotation)``.
    """

    kind: str
    params: dict = field(default_factory=dict)
    rotation: float = 0.0

    # ----------------------------------------------------------- builders
    @classmethod
    def constant(cls, radius: float = 1.0, rotation: float = 0.0) -> "RadiusFunction":
        if not radius > 0:
            raise InvalidDomainError("constant radius must be positive")
        return cls("constant", {"radius": float(radius)}, float(rotation))

    @classmethod
    def centered_ellipse(cls, a: float, b: float, rotation: float = 0.0) -> "RadiusFunction":
        """Ellipse ``x^2/a^2 + y^2/b^2 = 1`` centred at the origin."""
        if not (a > 0 and b > 0):
            raise InvalidDomainError("ellipse semi-axes must be positive")
        return cls("centered_ellipse", {"a": float(a), "b": float(b)}, float(rotation))

    @classmethod
    def offset_disk(cls, R0: float, x0: Sequence[float], rotation: float = 0.0) -> "RadiusFunction":
        """Disk of radius ``R0`` centred at ``x0``; the origin must lie inside."""
        x0 = (float(x0[0]), float(x0[1]))
        if not R0 > 0:
            raise InvalidDomainError("disk radius must be positive")
        if math.hypot(*x0) >= R0:
            raise InvalidDomainError("offset disk must contain the origin strictly (|x0| < R0)")
        return cls("offset_disk", {"R0": float(R0), "x0": x0}, float(rotation))

    @classmethod
    def focal_ellipse(cls, a: float, e: float, rotation: float = 0.0) -> "RadiusFunction":
        """Ellipse with semi-major axis ``a`` and one focus at the origin."""
        if not a > 0:
            raise InvalidDomainError("semi-major axis must be positive")
        if not 0 <= e < 1:
            raise InvalidDomainError("eccentricity must lie in [0, 1)")
        return cls("focal_ellipse", {"a": float(a), "e": float(e)}, float(rotation))

    @classmethod
    def log_fourier(
        cls, cos: Sequence[float], sin: Sequence[float] = (), rotation: float = 0.0
    ) -> "RadiusFunction":
        """``ln rho(t) = c_0 + sum_m (c_m cos mt + s_m sin mt)``.

        ``cos`` holds ``c_0, c_1, ...`` and ``sin`` holds ``s_1, s_2, ...``.
        """
        c = tuple(float(v) for v in cos) or (0.0,)
        s = tuple(float(v) for v in sin)
        if not all(math.isfinite(v) for v in c + s):
            raise InvalidDomainError("log_fourier coefficients must be finite")
        return cls("log_fourier", {"cos": c, "sin": s}, float(rotation))

    @classmethod
    def piecewise_egg(
        cls,
        a: float,
        mask: Sequence[Sequence[float]] = ((0.0, math.pi),),
        harmonic: int = 1,
        rotation: float = 0.0,
    ) -> "RadiusFunction":
        """``rho = 1 + a sin^3(m t)`` on the mask intervals and ``1`` elsewhere."""
        if not 0 < a < 1:
            raise InvalidDomainError("egg amplitude must lie in (0, 1)")
        if int(harmonic) < 1:
            raise InvalidDomainError("egg harmonic must be a positive integer")
        intervals = []
        for lo, hi in mask:
            lo, hi = float(lo), float(hi)
            if not 0.0 <= lo < hi <= TWO_PI + 1e-12:
                raise InvalidDomainError(f"mask interval ({lo}, {hi}) must lie inside [0, 2pi]")
            intervals.append((lo, min(hi, TWO_PI)))
        intervals.sort()
        for (_, h0), (l1, _) in zip(intervals, intervals[1:]):
            if l1 < h0:
                raise InvalidDomainError("egg mask intervals overlap")
        return cls(
            "piecewise_egg",
            {"a": float(a), "mask": tuple(intervals), "harmonic": int(harmonic)},
            float(rotation),
        )

    def rotated(self, angle: float) -> "RadiusFunction":
        """Same domain rotated by ``angle`` counter-clockwise."""
        return RadiusFunction(self.kind, dict(self.params), self.rotation + float(angle))

    # ---------------------------------------------------------- evaluation
    def _local(self, u: np.ndarray):
        """Return ``(rho, ln1, ln2)`` at local (unrotated) angles ``u``."""
        p = self.params
        k = self.kind
        if k == "constant":
            return np.full_like(u, p["radius"]), np.zeros_like(u), np.zeros_like(u)
        if k == "centered_ellipse":
            a, b = p["a"], p["b"]
            c, s = np.cos(u), np.sin(u)
            D = b * b * c * c + a * a * s * s
            d1 = (a * a - b * b) * np.sin(2 * u)
            d2 = 2.0 * (a * a - b * b) * np.cos(2 * u)
            return a * b / np.sqrt(D), -d1 / (2 * D), -d2 / (2 * D) + d1 * d1 / (2 * D * D)
        if k == "offset_disk":
            R0 = p["R0"]
            d = math.hypot(*p["x0"])
            v = u - math.atan2(p["x0"][1], p["x0"][0])
            c, s = np.cos(v), np.sin(v)
            S = np.sqrt(R0 * R0 - d * d * s * s)
            return d * c + S, -d * s / S, -d * R0 * R0 * c / S**3
        if k == "focal_ellipse":
            a, e = p["a"], p["e"]
            c, s = np.cos(u), np.sin(u)
            den = 1.0 + e * c
            return a * (1 - e * e) / den, e * s / den, e * (e + c) / den**2
        if k == "log_fourier":
            lnr = np.zeros_like(u)
            l1 = np.zeros_like(u)
            l2 = np.zeros_like(u)
            for m, cm in enumerate(p["cos"]):
                if m == 0:
                    lnr = lnr + cm
                    continue
                cu, su = np.cos(m * u), np.sin(m * u)
                lnr = lnr + cm * cu
                l1 = l1 - m * cm * su
                l2 = l2 - m * m * cm * cu
            for m, sm in enumerate(p["sin"], start=1):
                cu, su = np.cos(m * u), np.sin(m * u)
                lnr = lnr + sm * su
                l1 = l1 + m * sm * cu
                l2 = l2 - m * m * sm * su
            return np.exp(lnr), l1, l2
        if k == "piecewise_egg":
            rho, r1, r2 = self._egg(u)
            l1 = r1 / rho
            return rho, l1, r2 / rho - l1 * l1
        raise InvalidDomainError(f"unknown radius-function kind {k!r}")

    def _egg(self, u: np.ndarray):
        p = self.params
        a, m = p["a"], p["harmonic"]
        w = np.mod(u, TWO_PI)
        inside = np.zeros(u.shape, dtype=bool)
        for lo, hi in p["mask"]:
            inside |= (w > lo) & (w < hi)
        sn, cs = np.sin(m * w), np.cos(m * w)
        rho = 1.0 + np.where(inside, a * sn**3, 0.0)
        r1 = np.where(inside, 3 * a * m * sn * sn * cs, 0.0)
        r2 = np.where(inside, 3 * a * m * m * sn * (2 * cs * cs - sn * sn), 0.0)
        return rho, r1, r2

    def evaluate(self, theta) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Vectorized ``(rho, rho', rho'', (ln rho)', (ln rho)'')`` at ``theta``.

        Raises
        ------
        EvaluationError
            If any value is non-finite or ``rho <= 0``.
        """
        t = np.asarray(theta, dtype=float)
        with np.errstate(all="ignore"):
            rho, l1, l2 = self._local(t - self.rotation)
            rho = np.broadcast_to(rho, t.shape).astype(float)
            l1 = np.broadcast_to(l1, t.shape).astype(float)
            l2 = np.broadcast_to(l2, t.shape).astype(float)
            r1 = rho * l1
            r2 = rho * (l2 + l1 * l1)
        bad = ~(np.isfinite(rho) & np.isfinite(l1) & np.isfinite(l2) & (rho > 0))
        if np.any(bad):
            where = t[bad] if t.ndim else t
            first = float(np.ravel(where)[0])
            raise EvaluationError(f"radius function {self.kind} failed at theta={first!r}", theta=first)
        return rho, r1, r2, l1, l2

    def __call__(self, theta):
        return self.evaluate(theta)[0]

    def ln1(self, theta):
        return self.evaluate(theta)[3]

    def ln2(self, theta):
        return self.evaluate(theta)[4]

    def rho1(self, theta):
        return self.evaluate(theta)[1]

    def rho2(self, theta):
        return self.evaluate(theta)[2]

    def max_radius(self, grid_size: int = 1024) -> float:
        t = np.linspace(0.0, TWO_PI, grid_size, endpoint=False)
        return float(np.max(self(t)))

    def knots(self) -> list[float]:
        """Points where a piecewise kind switches formula (empty otherwise)."""
        if self.kind != "piecewise_egg":
            return []
        pts = sorted({x for iv in self.params["mask"] for x in iv})
        return [float((x + self.rotation) % TWO_PI) for x in pts]

    def c2_defect(self) -> float:
        """Largest jump of ``rho``, ``rho'`` or ``rho''`` across the knots.

        Piecewise formulas are C^2 only if this vanishes; the value is
        reported rather than enforced.
        """
        p = self.params
        if self.kind != "piecewise_egg":
            return 0.0
        a, m, mask = p["a"], p["harmonic"], p["mask"]

        def values(x: float, inside: bool):
            if not inside:
                return (1.0, 0.0, 0.0)
            sn, cs = math.sin(m * x), math.cos(m * x)
            return (1 + a * sn**3, 3 * a * m * sn * sn * cs, 3 * a * m * m * sn * (2 * cs * cs - sn * sn))

        worst = 0.0
        for x in sorted({v % TWO_PI for iv in mask for v in iv}):
            xl = x if x > 0 else TWO_PI  # approach from the left
            left = any(lo < xl <= hi for lo, hi in mask)
            right = any(lo <= x < hi for lo, hi in mask)
            jumps = [abs(u - v) for u, v in zip(values(xl, left), values(x, right))]
            worst = max(worst, *jumps)
        return worst

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"kind": self.kind}
        for key, val in self.params.items():
            if key == "mask":
                d[key] = [list(iv) for iv in val]
            elif isinstance(val, tuple):
                d[key] = list(val)
            else:
                d[key] = val
        if self.rotation:
            d["rotation"] = self.rotation
        return d


@dataclass(frozen=True)
class BoundaryJet:
    """Boundary point and its first two derivatives in the polar angle."""

    theta: Any
    y: np.ndarray
    y1: np.ndarray
    y2: np.ndarray
    rho: Any
    rho1: Any
    rho2: Any
    ln1: Any
    ln2: Any


def boundary_jet(rf: RadiusFunction, theta) -> BoundaryJet:
    """Evaluate ``y``, ``y'`` and ``y''`` at ``theta`` (scalar or array).

    Vector fields carry a trailing axis of length 2.
    """
    t = np.asarray(theta, dtype=float)
    rho, r1, r2, l1, l2 = rf.evaluate(t)
    c, s = np.cos(t), np.sin(t)
    e = np.stack([c, s], axis=-1)
    ep = np.stack([-s, c], axis=-1)
    rr = rho[..., None]
    y = rr * e
    y1 = rr * (l1[..., None] * e + ep)
    y2 = rr * ((l1 * l1 - 1 + l2)[..., None] * e + 2 * l1[..., None] * ep)
    if t.ndim == 0:
        return BoundaryJet(float(t), y, y1, y2, float(rho), float(r1), float(r2), float(l1), float(l2))
    return BoundaryJet(t, y, y1, y2, rho, r1, r2, l1, l2)


# ---------------------------------------------------------------- maxima
class LogCurvatureMax(NamedTuple):
    value: float
    argmax: float
    closed_form: float | None


def closed_form_max_ln2(rf: RadiusFunction) -> float | None:
    """Known maximum of ``(ln rho)''`` for ellipse, disk and focal kinds."""
    p = rf.params
    if rf.kind == "constant":
        return 0.0
    if rf.kind == "centered_ellipse":
        lo, hi = sorted((p["a"], p["b"]))
        e2 = 1.0 - (lo / hi) ** 2
        return e2 if e2 <= 2.0 / 3.0 else (2 - e2) ** 2 / (8 * (1 - e2))
    if rf.kind == "offset_disk":
        d = math.hypot(*p["x0"])
        if d == 0:
            return 0.0
        s = p["R0"] / d
        return 1.0 / s if s >= math.sqrt(3.0) else (2.0 / (3.0 * math.sqrt(3.0))) * s * s / (s * s - 1)
    if rf.kind == "focal_ellipse":
        e = p["e"]
        return e / (1 + e) if e < 0.5 else 1.0 / (4.0 - 4.0 * e * e)
    return None


def max_log_second_derivative(rf: RadiusFunction, grid_size: int = 1024) -> LogCurvatureMax:
    """Global maximum of ``(ln rho)''`` by grid search plus local polishing.

    The best few grid-local maxima are refined with bounded Brent iterations
    (``xatol = 1e-13``) on the two adjacent grid cells.
    """
    if grid_size < 512:
        raise UnsupportedParameterError("grid_size must be at least 512")
    t = np.linspace(0.0, TWO_PI, grid_size, endpoint=False)
    v = rf.ln2(t)
    step = TWO_PI / grid_size
    is_peak = (v >= np.roll(v, 1)) & (v >= np.roll(v, -1))
    peaks = np.flatnonzero(is_peak)
    peaks = peaks[np.argsort(v[peaks])[::-1][:6]]
    best_val, best_t = float(v[peaks[0]]), float(t[peaks[0]])
    f = lambda x: -float(rf.ln2(x))  # noqa: E731
    for i in peaks:
        res = minimize_scalar(
            f, bounds=(t[i] - step, t[i] + step), method="bounded", options={"xatol": 1e-13}
        )
        if -res.fun > best_val:
            best_val, best_t = -float(res.fun), float(res.x)
    return LogCurvatureMax(best_val, best_t % TWO_PI, closed_form_max_ln2(rf))


# ------------------------------------------------------------ zero sets
@dataclass(frozen=True)
class ZeroSet:
    """Zeros of ``rho'`` on the circle: isolated points and closed arcs.

    Arcs are ``(lo, hi)`` with ``0 <= lo < 2 pi`` and ``lo < hi <= lo + 2 pi``.
    """

    points: tuple[float, ...]
    intervals: tuple[tuple[float, float], ...]

    @property
    def is_everything(self) -> bool:
        return any(hi - lo >= TWO_PI - 1e-12 for lo, hi in self.intervals)

    def flat_measure(self) -> float:
        return sum(hi - lo for lo, hi in self.intervals)

    def to_dict(self) -> dict[str, Any]:
        return {"points": list(self.points), "intervals": [list(iv) for iv in self.intervals]}


def _flat(rf: RadiusFunction, t) -> np.ndarray:
    rho, r1 = rf.evaluate(t)[:2]
    return np.abs(r1) < 1e-12 * (1 + np.abs(rho))


def _edge(rf: RadiusFunction, inside: float, outside: float) -> float:
    """Bisect the boundary of the flat predicate between two angles."""
    for _ in range(60):
        mid = 0.5 * (inside + outside)
        if bool(_flat(rf, mid)):
            inside = mid
        else:
            outside = mid
        if abs(outside - inside) < 1e-13:
            break
    return inside


def zero_set_rho1(rf: RadiusFunction, grid_size: int = 4096) -> ZeroSet:
    """Locate the zeros of ``rho'``.

    A point counts as a zero when ``|rho'| < 1e-12 (1 + |rho|)``.  Runs of
    such grid points become closed arcs with bisected endpoints; sign changes
    are bracketed and bisected to ``1e-12``; touching zeros without a sign
    change are found by minimizing ``|rho'|`` between grid neighbours.
    """
    n = grid_size
    t = np.linspace(0.0, TWO_PI, n, endpoint=False)
    step = TWO_PI / n
    rho, r1 = rf.evaluate(t)[:2]
    flat = np.abs(r1) < 1e-12 * (1 + np.abs(rho))
    if flat.all():
        return ZeroSet((), ((0.0, TWO_PI),))
    intervals = []
    points: list[float] = []
    # Rotate so that index 0 is not flat, then walk runs.
    start = int(np.flatnonzero(~flat)[0])
    order = (np.arange(n) + start) % n
    i = 0
    while i < n:
        idx = order[i]
        if not flat[idx]:
            i += 1
            continue
        j = i
        while j + 1 < n and flat[order[j + 1]]:
            j += 1
        t_lo = t[order[i]] + (TWO_PI if order[i] < start else 0.0)
        t_hi = t[order[j]] + (TWO_PI if order[j] < start else 0.0)
        if j > i:
            lo = _edge(rf, t_lo, t_lo - step)
            hi = _edge(rf, t_hi, t_hi + step)
            lo_n = lo % TWO_PI
            intervals.append((float(lo_n), float(lo_n + (hi - lo))))
        else:
            left, right = t_lo - step, t_lo + step
            fl, fr = float(rf.rho1(left)), float(rf.rho1(right))
            if fl * fr < 0:
                points.append(bisect(lambda x: float(rf.rho1(x)), left, right, xtol=1e-13) % TWO_PI)
            else:
                points.append(t_lo % TWO_PI)
        i = j + 1
    # Sign changes between consecutive non-flat grid points.
    nxt = np.roll(np.arange(n), -1)
    sc = (~flat) & (~flat[nxt]) & (np.sign(r1) * np.sign(r1[nxt]) < 0)
    g = lambda x: float(rf.rho1(x))  # noqa: E731
    for idx in np.flatnonzero(sc):
        lo = t[idx]
        points.append(bisect(g, lo, lo + step, xtol=1e-13) % TWO_PI)
    # Touching zeros: local minima of |rho'| with no sign change nearby.
    a = np.abs(r1)
    cand = (~flat) & (a <= np.roll(a, 1)) & (a <= np.roll(a, -1))
    cand &= np.sign(np.roll(r1, 1)) == np.sign(np.roll(r1, -1))
    cand &= ~flat[np.roll(np.arange(n), 1)] & ~flat[nxt]
    for idx in np.flatnonzero(cand):
        res = minimize_scalar(
            lambda x: abs(g(x)), bounds=(t[idx] - step, t[idx] + step), method="bounded",
            options={"xatol": 1e-13},
        )
        if bool(_flat(rf, res.x)):
            points.append(float(res.x) % TWO_PI)
    points.sort()
    dedup: list[float] = []
    for p in points:
        if dedup and (p - dedup[-1]) < 1e-9:
            continue
        dedup.append(p)
    if len(dedup) > 1 and dedup[0] + TWO_PI - dedup[-1] < 1e-9:
        dedup.pop()
    # Drop points that lie on a flat arc.
    kept = [p for p in dedup if not any(_on_arc(p, iv) for iv in intervals)]
    return ZeroSet(tuple(kept), tuple(sorted(intervals)))


def _on_arc(p: float, iv: tuple[float, float], pad: float = 1e-9) -> bool:
    lo, hi = iv
    x = (p - lo) % TWO_PI
    return x <= hi - lo + pad or x >= TWO_PI - pad


# --------------------------------------------------------- sign profile
@dataclass(frozen=True)
class SignInterval:
    lo: float
    hi: float
    sign: int
    sign_shifted: int

    def to_dict(self) -> dict[str, Any]:
        return {"lo": self.lo, "hi": self.hi, "sign": self.sign, "sign_shifted": self.sign_shifted}


def _sign(rf: RadiusFunction, t: float) -> int:
    rho, r1 = rf.evaluate(t)[:2]
    if abs(float(r1)) < 1e-12 * (1 + abs(float(rho))):
        return 0
    return 1 if r1 > 0 else -1


def sign_profile(rf: RadiusFunction, grid_size: int = 4096, zeros: ZeroSet | None = None) -> list[SignInterval]:
    """Partition the circle by the zeros of ``rho'(t)`` and ``rho'(t + pi)``.

    Each cell records the sign of ``rho'`` and of its ``pi``-shift at the
    cell midpoint (``0`` on flat arcs).
    """
    zs = zeros if zeros is not None else zero_set_rho1(rf, grid_size)
    if zs.is_everything:
        return [SignInterval(0.0, TWO_PI, 0, 0)]
    cuts = set()
    for x in list(zs.points) + [v for iv in zs.intervals for v in iv]:
        cuts.add(float(x % TWO_PI))
        cuts.add(float((x - math.pi) % TWO_PI))
    pts = sorted(cuts)
    merged: list[float] = []
    for p in pts:
        if not merged or p - merged[-1] > 1e-12:
            merged.append(p)
    if len(merged) > 1 and merged[0] + TWO_PI - merged[-1] <= 1e-12:
        merged.pop()
    if not merged:
        s = _sign(rf, 0.0), _sign(rf, math.pi)
        return [SignInterval(0.0, TWO_PI, *s)]
    out = []
    for i, lo in enumerate(merged):
        hi = merged[i + 1] if i + 1 < len(merged) else merged[0] + TWO_PI
        mid = 0.5 * (lo + hi)
        out.append(SignInterval(lo, hi, _sign(rf, mid), _sign(rf, mid + math.pi)))
    return out


# ------------------------------------------------------------ hypotheses
@dataclass(frozen=True)
class HypothesisReport:
    """Outcome of every geometric hypothesis check for one ``(rho, q)``."""

    q: float
    kind: str
    admissible: bool
    margin: float
    max_ln2: float
    argmax_t: float
    closed_form_max: float | None
    theorem_flags: dict[str, bool]
    zero_set_rho1: ZeroSet
    c2_defect: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "kind": self.kind,
            "admissible": self.admissible,
            "margin": self.margin,
            "max_ln2": self.max_ln2,
            "argmax_t": self.argmax_t,
            "closed_form_max": self.closed_form_max,
            "theorem_flags": dict(self.theorem_flags),
            "zero_set_rho1": self.zero_set_rho1.to_dict(),
            "c2_defect": self.c2_defect,
        }


def disk_threshold(q: float) -> float:
    """Largest admissible ``|x0|/R0`` for an offset disk (``q > 1``)."""
    sq = math.sqrt(q)
    if sq <= 1.0 / (math.sqrt(3.0) - 1.0):
        return sq / (1 + sq)
    return math.sqrt(1 - 2 * (1 + sq) / (3 * math.sqrt(3 * q)))


def focal_threshold(q: float) -> float:
    """Upper bound on ``e^2`` for a focal ellipse (``q > 1``)."""
    return 0.75 - 1.0 / (4.0 * math.sqrt(q))


def check_hypotheses(rf: RadiusFunction, q: float, grid_size: int = 4096) -> HypothesisReport:
    """Evaluate the admissibility condition and every theorem hypothesis."""
    if not q > 1:
        raise UnsupportedParameterError("only q > 1 is supported")
    mx = max_log_second_derivative(rf, max(1024, grid_size // 4))
    bound = admissibility_bound(q)
    margin = bound - mx.value
    admissible = margin > 0
    zs = zero_set_rho1(rf, grid_size)
    prof = sign_profile(rf, grid_size, zs)
    p = rf.params
    flags = dict.fromkeys(THEOREM_KEYS, False)

    if rf.kind == "centered_ellipse":
        lo, hi = sorted((p["a"], p["b"]))
        e2 = 1 - (lo / hi) ** 2
        flags["Thm-ellipse"] = 0 < e2 < bound
    if rf.kind == "offset_disk":
        d = math.hypot(*p["x0"])
        flags["Thm-disk"] = d > 0 and d / p["R0"] < disk_threshold(q)
    if rf.kind == "focal_ellipse":
        e2 = p["e"] ** 2
        flags["Thm-focal"] = 0 < e2 < focal_threshold(q)

    def r1(x):
        rho, d1 = rf.evaluate(x)[:2]
        return d1, rho

    def r2(x):
        return rf.evaluate(x)[2]

    meaningful = [c for c in prof if c.hi - c.lo > 1e-4]
    # Star1: flat on a set of measure pi whose shift is a.e. non-flat.
    flat_measure = zs.flat_measure()
    flags["Star1-cond"] = (
        admissible
        and not zs.is_everything
        and abs(flat_measure - math.pi) < 1e-4
        and all((c.sign == 0) != (c.sign_shifted == 0) for c in meaningful)
    )
    # Main1 base: no flat arcs and a pi-symmetric zero set.
    symmetric = True
    for z in zs.points:
        d1, rho = r1(z + math.pi)
        if abs(float(d1)) > 1e-8 * (1 + float(rho)):
            symmetric = False
    base = admissible and not zs.intervals and symmetric
    flags["Main1-(i)"] = base and all(c.sign == c.sign_shifted for c in prof)
    flags["Main1-(ii)"] = base and all(
        abs(float(r2(z))) + abs(float(r2(z + math.pi))) > 1e-10 for z in zs.points
    )
    flags["Anly-(i)"] = admissible and any(
        c.sign != 0 and c.sign * c.sign_shifted >= 0 for c in meaningful
    )
    t = np.linspace(0.0, TWO_PI, grid_size, endpoint=False)
    extra = np.array(list(zs.points) + [x for iv in zs.intervals for x in iv])
    tt = np.concatenate([t, extra, extra - math.pi])
    _, d1a, d2a = rf.evaluate(tt)[:3]
    _, d1b, d2b = rf.evaluate(tt + math.pi)[:3]
    Q = np.abs(d1a) + np.abs(d1b) + np.abs(d2a) + np.abs(d2b)
    flags["Anly-(ii)"] = admissible and bool(np.all(Q > 1e-10))

    return HypothesisReport(
        q=float(q),
        kind=rf.kind,
        admissible=bool(admissible),
        margin=float(margin),
        max_ln2=float(mx.value),
        argmax_t=float(mx.argmax),
        closed_form_max=mx.closed_form,
        theorem_flags={k: bool(v) for k, v in flags.items()},
        zero_set_rho1=zs,
        c2_defect=rf.c2_defect(),
    )
