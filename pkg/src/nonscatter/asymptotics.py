"""Leading-order stationary-phase values and the algebra built on them."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .density import HerglotzDensity
from .errors import UnsupportedParameterError, ValidationError
from .geometry import RadiusFunction
from .stationary import PAIRS, StationaryPoint, perp, stationary_set

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class AsymptoticTerm:
    """One summand of the leading-order expansion.

    ``amplitude = phi(theta_xi) Psi / |det|^(1/2) exp(i pi sig / 4)``; the
    oscillating factor ``exp(i k psi)`` and the weight power are applied by
    :func:`leading_order`.
    """

    point: StationaryPoint
    amplitude: complex
    phase: float
    weight: float
    weight_perp: float
    N_power: int = 0


def asymptotic_terms(
    rf: RadiusFunction, q: float, phi: HerglotzDensity, eta_theta: float, N: int = 0,
    points: Sequence[StationaryPoint] | None = None,
) -> list[AsymptoticTerm]:
    """The four terms sorted by ``(j, l)``."""
    pts = list(points) if points is not None else stationary_set(rf, q, eta_theta)
    eta = np.array([math.cos(eta_theta), math.sin(eta_theta)])
    out = []
    for p in sorted(pts, key=lambda p: (p.j, p.l)):
        amp = phi(p.theta_xi) * p.Psi / math.sqrt(abs(p.det)) * cmath.exp(1j * math.pi * p.signature / 4)
        y = float(rf(p.theta)) * np.array([math.cos(p.theta), math.sin(p.theta)])
        out.append(AsymptoticTerm(p, complex(amp), p.psi, p.f, float(perp(eta) @ y), int(N)))
    return out


def sum_terms(terms: Sequence[AsymptoticTerm], k, N: int = 0, q: float = 1.0, weight: str = "f"):
    """``(2 pi/k)(i k sqrt(q))^N sum amplitude w^N exp(i k psi)``."""
    if weight not in ("f", "perp"):
        raise ValidationError("weight must be 'f' or 'perp'")
    kk = np.asarray(k, dtype=float)
    total = np.zeros(kk.shape, dtype=complex)
    for t in terms:
        w = t.weight if weight == "f" else t.weight_perp
        total = total + t.amplitude * (w**N) * np.exp(1j * kk * t.phase)
    val = (TWO_PI / kk) * (1j * kk * math.sqrt(q)) ** N * total
    return complex(val) if kk.ndim == 0 else val


def leading_order(
    rf: RadiusFunction, q: float, phi: HerglotzDensity, eta_theta: float, k, N: int = 0, weight: str = "f"
):
    """Stationary-phase leading term of the ``N``-th ``theta_eta`` derivative.

    ``k`` may be an array; the stationary points are computed once.
    ``weight='perp'`` uses ``eta_perp . y`` in place of ``f``; the two agree
    at stationary points.
    """
    if N < 0:
        raise ValidationError("N must be non-negative")
    if np.any(np.asarray(k) <= 0):
        raise UnsupportedParameterError("wave number must be positive")
    terms = asymptotic_terms(rf, q, phi, eta_theta, N)
    return sum_terms(terms, k, N, q, weight)


def f_values(rf: RadiusFunction, q: float, eta_theta: float) -> dict[tuple[int, int], float]:
    """Weights ``f^{j,l} = rho(T) sin(T - theta_eta)``."""
    return {p.label: p.f for p in stationary_set(rf, q, eta_theta)}


# ------------------------------------------------------------- Lambda
@dataclass(frozen=True)
class LambdaSet:
    members: frozenset
    tol: float

    def __len__(self) -> int:
        return len(self.members)


def lambda_set(phi: HerglotzDensity, points: Sequence[StationaryPoint], tol: float = 1e-8) -> LambdaSet:
    """Branches where ``|phi(theta_xi)| > tol * sup |phi|``."""
    if not 0 < tol < 0.1:
        raise ValidationError("tol must lie in (0, 0.1)")
    norm = phi.sup_norm()
    members = frozenset(p.label for p in points if norm > 0 and abs(phi(p.theta_xi)) > tol * norm)
    return LambdaSet(members, tol)


# -------------------------------------------------------- Vandermonde
@dataclass(frozen=True)
class VandermondeVerdict:
    """Classification of ``sum_i a_i^N u_i c_i = 0`` for ``N = 0..3``.

    ``label`` is one of ``empty`` (no nonzero amplitude), ``all-equal-weights``,
    ``paired`` (two groups of equal weight, each summing to zero) or
    ``inconsistent``.  ``residual`` is the smallest attainable norm of the
    system over unit-modulus phases ``u_i`` relative to ``sum |c_i|``.
    """

    label: str
    groups: tuple[tuple[int, ...], ...]
    residual: float
    support: tuple[int, ...] = field(default=())

    @property
    def consistent(self) -> bool:
        return self.label != "inconsistent"


def _polygon_gap(mags: Sequence[float]) -> float:
    """Smallest ``|sum u_i r_i|`` over unit ``u_i``: ``max(0, 2 r_max - sum r)``."""
    if not mags:
        return 0.0
    return max(0.0, 2 * max(mags) - sum(mags))


def vandermonde_classify(
    weights: Sequence[float], amplitudes: Sequence[complex], tol: float = 1e-9, amp_tol: float = 0.0
) -> VandermondeVerdict:
    """Decide whether unit phases can null the ``N = 0..3`` moment system.

    Amplitudes with ``|c| <= amp_tol`` are dropped (they play no role).  The
    remaining weights are grouped when they agree to ``tol`` (relative to
    their scale).  With at most four distinct weights the moment matrix is
    an invertible Vandermonde matrix on the distinct values, so the system
    holds exactly when each group of equal weights sums to zero.  A group is
    nullable by unit phases exactly when its magnitudes close a polygon,
    i.e. no magnitude exceeds the sum of the others.
    """
    a = [float(w) for w in weights]
    c = [complex(z) for z in amplitudes]
    if len(a) != len(c):
        raise ValidationError("weights and amplitudes must have equal length")
    support = tuple(i for i, z in enumerate(c) if abs(z) > amp_tol)
    if not support:
        return VandermondeVerdict("empty", (), 0.0, ())
    scale = max(1.0, max(abs(a[i]) for i in support))
    groups: list[list[int]] = []
    for i in support:
        for g in groups:
            if abs(a[g[0]] - a[i]) <= tol * scale:
                g.append(i)
                break
        else:
            groups.append([i])
    total = sum(abs(c[i]) for i in support)
    gaps = [_polygon_gap([abs(c[i]) for i in g]) for g in groups]
    residual = math.sqrt(sum(g * g for g in gaps)) / total
    ok = residual <= tol
    gtuple = tuple(tuple(g) for g in groups)
    if not ok:
        label = "inconsistent"
    elif len(groups) == 1:
        label = "all-equal-weights"
    else:
        label = "paired"
    return VandermondeVerdict(label, gtuple, residual, support)


def moment_residual(weights: Sequence[float], amplitudes: Sequence[complex], phases: Sequence[complex]) -> float:
    """Euclidean norm of ``V (u * c)`` for the ``4 x n`` moment matrix ``V``."""
    a = np.asarray(weights, dtype=float)
    z = np.asarray(phases, dtype=complex) * np.asarray(amplitudes, dtype=complex)
    V = np.vander(a, 4, increasing=True).T
    return float(np.linalg.norm(V @ z))


# -------------------------------------------------------------- G ratio
def g_ratio(
    rf: RadiusFunction, q: float, eta_theta: float, pair1: tuple[int, int], pair2: tuple[int, int],
    points: Sequence[StationaryPoint] | None = None,
) -> float:
    """``|det_1|/|det_2| * Psi_2^2/Psi_1^2`` between two branches."""
    pts = {p.label: p for p in (points or stationary_set(rf, q, eta_theta))}
    p1, p2 = pts[tuple(pair1)], pts[tuple(pair2)]
    return abs(p1.det) / abs(p2.det) * p2.Psi**2 / p1.Psi**2


def ellipse_g0_closed_form(s2: float, q: float) -> float:
    """Ratio ``G_{21,11}`` at ``theta_eta = 0`` for the centred ellipse."""
    sq = math.sqrt(q)
    return (sq - 1 + s2) / (sq + 1 - s2) * (sq - 1) ** 2 / (sq + 1) ** 2


def star_axis_g_closed_form(rf: RadiusFunction, q: float) -> float:
    """``G_{11,12}(0)`` for a radius function with ``rho'(0) = rho'(pi) = 0``."""
    sq = math.sqrt(q)
    l2 = rf.ln2(np.array([0.0, math.pi]))
    return float((sq - (sq + 1) * l2[0]) / (sq - (sq + 1) * l2[1]))


# ------------------------------------------------ matching conditions
@dataclass(frozen=True)
class MatchingReport:
    """Both axis identities for every branch choice, with residuals.

    ``A[j]`` and ``B[jhat]`` hold ``lhs - rhs``.  ``combinations`` maps each
    ``(j, jhat)`` to whether both identities hold within ``tol`` together
    with the structural reason the pair is impossible.
    """

    rho0: float
    rhopi: float
    rho2_0: float
    rho2_pi: float
    A: dict[int, float]
    B: dict[int, float]
    satisfied_A: dict[int, bool]
    satisfied_B: dict[int, bool]
    combinations: dict[tuple[int, int], dict[str, Any]]
    tol: float

    @property
    def any_satisfied(self) -> bool:
        return any(v["satisfied"] for v in self.combinations.values())

    def to_dict(self) -> dict[str, Any]:
        return {
            "rho0": self.rho0,
            "rhopi": self.rhopi,
            "rho2_0": self.rho2_0,
            "rho2_pi": self.rho2_pi,
            "A": {str(k): v for k, v in self.A.items()},
            "B": {str(k): v for k, v in self.B.items()},
            "combinations": {f"{j},{jh}": v for (j, jh), v in self.combinations.items()},
            "any_satisfied": self.any_satisfied,
        }


def matching_conditions_at_axis(rf: RadiusFunction, q: float, tol: float = 1e-9) -> MatchingReport:
    """Evaluate the two axis identities that close the contradiction argument.

    Raises
    ------
    UnsupportedParameterError
        Unless ``rho'(0) = rho'(pi) = 0`` and ``rho''(0) rho''(pi) != 0``.
    """
    if not q > 1:
        raise UnsupportedParameterError("only q > 1 is supported")
    sq = math.sqrt(q)
    rho, r1, r2 = (np.asarray(v) for v in rf.evaluate(np.array([0.0, math.pi]))[:3])
    if np.any(np.abs(r1) > 1e-10 * (1 + rho)):
        raise UnsupportedParameterError("matching conditions need rho'(0) = rho'(pi) = 0")
    if np.any(np.abs(r2) < 1e-12):
        raise UnsupportedParameterError("matching conditions need rho''(0) rho''(pi) != 0")
    p0, pp = float(rho[0]), float(rho[1])
    d0, dp = float(r2[0]), float(r2[1])
    A, B = {}, {}
    for j in (1, 2):
        rhs = 1 / pp - sq / ((sq - (-1) ** j) * dp)
        A[j] = sq / ((sq + 1) * d0) - 1 / p0 - rhs
        B[j] = sq / ((sq - 1) * d0) - 1 / p0 - rhs
    scale = 1 / p0 + 1 / pp + sq / abs(d0) + sq / abs(dp)
    satA = {j: abs(v) <= tol * scale for j, v in A.items()}
    satB = {j: abs(v) <= tol * scale for j, v in B.items()}
    combos = {}
    for j in (1, 2):
        for jh in (1, 2):
            if j == jh:
                reason = "identities differ only in the (sqrt(q)+-1) factor at 0; incompatible"
            elif (j, jh) == (1, 2):
                reason = "forces rho''(0) = -rho''(pi) and rho(0) = -rho(pi), violating rho > 0"
            else:
                reason = "forces rho''(0) rho''(pi) > 0, contradicting rho''(pi) < 0 < rho''(0)"
            combos[(j, jh)] = {"satisfied": bool(satA[j] and satB[jh]), "reason": reason}
    return MatchingReport(p0, pp, d0, dp, A, B, satA, satB, combos, tol)


# ----------------------------------------------------------- decay probe
@dataclass(frozen=True)
class DecayTable:
    """Rows ``(k, |oracle - leading|, k |oracle - leading|, converged)``.

    ``ratios`` are successive quotients of the scaled residual.  ``verdict``
    is ``decreasing`` when every ratio is below ``threshold``,
    ``not-decreasing`` otherwise and ``insufficient`` for a single row.
    ``monotone`` is the weaker statement that the scaled residual never
    grows; it is None for a single row.
    """

    rows: tuple[tuple[float, float, float, bool], ...]
    ratios: tuple[float, ...]
    verdict: str
    threshold: float = 0.9
    monotone: bool | None = None


def decay_probe(
    rf: RadiusFunction, q: float, phi: HerglotzDensity, eta_theta: float, k_list: Sequence[float],
    spec=None, threshold: float = 0.9,
) -> DecayTable:
    """Compare the oracle with the leading term along increasing ``k``."""
    from .oracle import integral_I

    ks = [float(k) for k in k_list]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValidationError("k_list must be strictly increasing")
    terms = asymptotic_terms(rf, q, phi, eta_theta)
    rows = []
    for k in ks:
        res = integral_I(rf, q, phi, eta_theta, k, spec)
        lead = sum_terms(terms, k, 0, q)
        r = abs(res.value - lead)
        rows.append((k, r, k * r, bool(res.converged)))
    ratios = tuple(b[2] / a[2] if a[2] > 0 else math.inf for a, b in zip(rows, rows[1:]))
    if len(rows) < 2:
        verdict = "insufficient"
    elif all(r < threshold for r in ratios):
        verdict = "decreasing"
    else:
        verdict = "not-decreasing"
    monotone = None if len(rows) < 2 else all(r < 1 for r in ratios)
    return DecayTable(tuple(rows), ratios, verdict, threshold, monotone)
