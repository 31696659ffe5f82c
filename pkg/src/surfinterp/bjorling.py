"""Björling problem for minimal (E^3) and maximal (L^3) surfaces.

Given a real-analytic curve ``a`` with a unit normal field ``n`` along it, the
unique minimal/maximal surface through ``a`` with normal ``n`` is ``Re f``
for the isotropic curve

    f = a + i*sigma * integral_{u0}^{w} n x a' dw

with ``sigma = +1`` and the Lorentzian cross product for maximal surfaces,
``sigma = -1`` and the Euclidean one for minimal surfaces.

The rest of the module certifies the result numerically: isotropy of ``f'``,
conformality and harmonicity of the sampled patch, vanishing mean curvature
(computed twice, from series derivatives and from finite differences of
positions), the immersion margin and the perturbation budget ``eta`` that
keeps nearby Weierstrass data immersed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import metric as _m
from .analytic import (
    SUP_SAFETY,
    AnalyticMap,
    DiscDomain,
    check_truncation,
    is_real_on_interval,
    series_cross,
    spacelike_margin,
)
from .curves import Violation
from .errors import DegenerateNormal, NotImmersed, OutOfDomain, ValidationFailed
from .metric import Metric

INF_SAFETY = 0.95
ETA_SAFETY = 0.9
ISOTROPY_TOL = 1e-10
TANGENT_MIN = 1e-10
FD_STEP = 1e-3


@dataclass(frozen=True)
class BjorlingData:
    a: AnalyticMap
    n: AnalyticMap
    metric: Metric

    @property
    def domain(self) -> DiscDomain:
        return self.a.domain


@dataclass(frozen=True)
class IsotropicCurve:
    """Holomorphic ``f: disc -> C^3`` with ``<f', f'> = 0`` up to the residual.

    ``d`` is the imaginary-side map when the curve came from Björling data
    (``f = a + i*twist*d``); ``reference_normal`` is ``n(u0)`` and fixes the
    orientation of sampled normals.
    """

    f: AnalyticMap
    metric: Metric
    isotropy_residual: float
    d: AnalyticMap | None = None
    reference_normal: np.ndarray | None = None
    tolerance: float = ISOTROPY_TOL

    @property
    def certified(self) -> bool:
        return self.isotropy_residual < self.tolerance

    @property
    def domain(self) -> DiscDomain:
        return self.f.domain


@dataclass
class SurfacePatch:
    u: np.ndarray
    v: np.ndarray
    positions: np.ndarray
    normals: np.ndarray
    E: np.ndarray
    F: np.ndarray
    G: np.ndarray
    H: np.ndarray
    H_fd: np.ndarray
    margin: np.ndarray
    metric: Metric = field(default=Metric.EUCLIDEAN)

    @property
    def shape(self):
        return self.positions.shape[:2]

    def conformality(self) -> float:
        """``max(|E - G|, |F|) / max(E, G)`` over the nodes."""
        scale = np.maximum(np.abs(self.E), np.abs(self.G))
        return float(np.max(np.maximum(np.abs(self.E - self.G), np.abs(self.F)) / scale))

    def mean_curvature_max(self, margin_floor: float = 0.1) -> float:
        mask = self.margin > margin_floor
        return float(np.max(np.abs(self.H[mask]))) if mask.any() else 0.0

    def mean_curvature_disagreement(self) -> float:
        return float(np.max(np.abs(self.H - self.H_fd)))


@dataclass(frozen=True)
class EtaBudget:
    zeta: float
    S: float
    eta: float

    def inequalities(self) -> dict:
        s, e, z = self.S, self.eta, self.zeta
        return {
            "upper": 2 * s * e + e * e < z / 3,
            "lower_positive": 0 < 2 * s * e - e * e,
            "lower_bound": 2 * s * e - e * e < z / 3,
        }

    def holds(self) -> bool:
        return self.zeta > 0 and self.eta > 0 and all(self.inequalities().values())


# ---------------------------------------------------------------------------


def validate(data: BjorlingData, tol: float = 1e-8, samples: int = 200) -> list[Violation]:
    a, n, met = data.a, data.n, data.metric
    out = []
    if a.domain != n.domain:
        return [Violation("domain-mismatch", None, float("nan"))]
    if not (a.is_vector and n.is_vector):
        return [Violation("not-a-3-vector", None, float("nan"))]
    for name, g in (("a", a), ("n", n)):
        if not is_real_on_interval(g, 1e-9):
            out.append(Violation(f"{name}-not-real", None, float(np.max(np.abs(g.coeffs.imag)))))
    u = a.domain.interval_samples(samples)
    ap = np.real(a.derivative()(u))
    nv = np.real(n(u))

    ortho = np.abs(_m.inner(met, nv, ap)) / np.maximum(1.0, np.linalg.norm(ap, axis=-1))
    i = int(np.argmax(ortho))
    if ortho[i] >= tol:
        out.append(Violation("not-orthogonal", float(u[i]), float(ortho[i])))

    unit = np.abs(_m.inner(met, nv, nv) - met.unit_normal_square)
    i = int(np.argmax(unit))
    if unit[i] >= tol:
        out.append(Violation("unit-norm", float(u[i]), float(unit[i])))

    if met is Metric.LORENTZ:
        margin = spacelike_margin(a, samples)
        if margin < TANGENT_MIN:
            sq = _m.inner(Metric.LORENTZ, ap, ap)
            j = int(np.argmin(sq))
            out.append(Violation("not-spacelike", float(u[j]), float(sq[j])))
    else:
        sq = np.sum(ap * ap, axis=-1)
        j = int(np.argmin(sq))
        if sq[j] < TANGENT_MIN:
            out.append(Violation("degenerate-tangent", float(u[j]), float(sq[j])))
    return out


def solve(data: BjorlingData, truncation_tol: float = 1e-10,
          isotropy_tol: float = ISOTROPY_TOL) -> IsotropicCurve:
    violations = validate(data)
    if violations:
        raise ValidationFailed(violations)
    check_truncation(data.a, truncation_tol, "curve a")
    check_truncation(data.n, truncation_tol, "normal n")
    met = data.metric
    integrand = series_cross(met, data.n, data.a.derivative())
    check_truncation(integrand, truncation_tol, "n x a'")
    d = integrand.antiderivative()
    f = data.a + d * (1j * met.twist)
    u0 = data.domain.center
    ref = np.real(data.n(u0))
    provisional = IsotropicCurve(f, met, float("nan"), d=d, reference_normal=ref)
    return IsotropicCurve(f, met, isotropy_residual(provisional), d=d, reference_normal=ref,
                          tolerance=isotropy_tol)


def _residual_points(dom: DiscDomain, samples: int) -> np.ndarray:
    return np.concatenate([dom.interval_samples(201), dom.disc_grid(samples), dom.circle(256)])


def isotropy_residual(curve, samples: int = 64, metric: Metric | None = None) -> float:
    """``sup |<f', f'>|`` over I, an interior lattice and the boundary circle."""
    if isinstance(curve, IsotropicCurve):
        f, metric = curve.f, curve.metric
    else:
        f = curve
    if metric is None:
        raise ValueError("metric required for a bare AnalyticMap")
    phi = f.derivative()(_residual_points(f.domain, samples))
    return float(np.max(np.abs(_m.inner(metric, phi, phi))))


def _margin(metric: Metric, phi):
    return np.sum(np.abs(phi) ** 2 * metric.signature, axis=-1)


def immersion_margin(curve: IsotropicCurve, samples: int = 64) -> float:
    """``min (|Phi1|^2 + |Phi2|^2 -/+ |Phi3|^2)`` over the closed disc, ``Phi = f'``."""
    phi = curve.f.derivative()(_residual_points(curve.domain, samples))
    return float(np.min(_margin(curve.metric, phi)))


def weierstrass_sup(curve: IsotropicCurve, samples: int = 64) -> float:
    """``max_i sup |Phi_i|`` over the sampled closed disc (no safety factor)."""
    phi = curve.f.derivative()(_residual_points(curve.domain, samples))
    return float(np.max(np.abs(phi)))


def eta_from_bounds(S: float, zeta: float, safety: float = ETA_SAFETY) -> float:
    """Largest ``eta`` meeting both quadratic constraints, times ``safety``.

    ``2 S eta + eta^2 < zeta/3`` gives ``eta < -S + sqrt(S^2 + zeta/3)``;
    ``0 < 2 S eta - eta^2 < zeta/3`` gives ``eta < S - sqrt(S^2 - zeta/3)``
    (or merely ``eta < 2 S`` when ``S^2 < zeta/3``).
    """
    if zeta <= 0:
        raise NotImmersed(f"immersion margin {zeta:.3e} is not positive")
    if S <= 0:
        raise ValueError("S must be positive")
    third = zeta / 3
    upper = third / (S + math.sqrt(S * S + third))
    disc = S * S - third
    lower = third / (S + math.sqrt(disc)) if disc >= 0 else 2 * S
    return safety * min(upper, lower)


def eta_budget(curve: IsotropicCurve, samples: int = 64) -> EtaBudget:
    zeta = INF_SAFETY * immersion_margin(curve, samples)
    if zeta <= 0:
        raise NotImmersed(f"immersion margin {zeta:.3e} is not positive")
    S = SUP_SAFETY * weierstrass_sup(curve, samples)
    return EtaBudget(zeta, S, eta_from_bounds(S, zeta))


# ---------------------------------------------------------------------------
# sampling


def _frame(metric, xu, xv, xuu, xuv, xvv, orient=None, margin_tol=0.0):
    """First/second fundamental forms, unit normal and mean curvature."""
    E = _m.inner(metric, xu, xu)
    F = _m.inner(metric, xu, xv)
    G = _m.inner(metric, xv, xv)
    raw = _m.cross(metric, xu, xv)
    q = _m.inner(metric, raw, raw)
    if metric is Metric.LORENTZ:
        bad = q >= -margin_tol
        scale = np.sqrt(np.where(bad, 1.0, -q))
    else:
        bad = q <= margin_tol
        scale = np.sqrt(np.where(bad, 1.0, q))
    if np.any(bad):
        raise DegenerateNormal(f"normal cannot be normalised at {int(bad.sum())} node(s)")
    N = raw / scale[..., None]
    if orient is not None:
        N = N * orient
    L = _m.inner(metric, xuu, N)
    M = _m.inner(metric, xuv, N)
    Nn = _m.inner(metric, xvv, N)
    H = metric.unit_normal_square * (E * Nn - 2 * F * M + G * L) / (2 * (E * G - F * F))
    return E, F, G, N, H


def _orientation(curve: IsotropicCurve) -> float:
    if curve.reference_normal is None:
        return 1.0
    u0 = curve.domain.center
    f1 = curve.f.derivative()(u0)
    xu, xv = np.real(f1), -np.imag(f1)
    raw = _m.cross(curve.metric, xu, xv)
    return 1.0 if float(np.dot(raw, curve.reference_normal)) >= 0 else -1.0


def _fd_derivatives(f: AnalyticMap, W: np.ndarray, h: float):
    """Position derivatives from a 3x3 stencil of evaluations of Re f."""
    X = {}
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            X[i, j] = np.real(_eval_unchecked(f, W + h * (i + 1j * j)))
    xu = (X[1, 0] - X[-1, 0]) / (2 * h)
    xv = (X[0, 1] - X[0, -1]) / (2 * h)
    xuu = (X[1, 0] - 2 * X[0, 0] + X[-1, 0]) / h**2
    xvv = (X[0, 1] - 2 * X[0, 0] + X[0, -1]) / h**2
    xuv = (X[1, 1] - X[1, -1] - X[-1, 1] + X[-1, -1]) / (4 * h**2)
    return xu, xv, xuu, xuv, xvv


def _eval_unchecked(f: AnalyticMap, w):
    # finite-difference stencils may poke a hair outside the disc
    t = np.asarray(w, dtype=complex) - f.domain.center
    acc = np.zeros(t.shape + (f.ncomp,), dtype=complex)
    for ck in f.coeffs.T[::-1]:
        acc = acc * t[..., None] + ck
    return acc if f.is_vector else acc[..., 0]


def sample_patch(curve: IsotropicCurve, u_range, v_range, nu: int = 64, nv: int = 64,
                 margin_tol: float = 1e-12) -> SurfacePatch:
    """Sample ``X = Re f`` on a ``nu x nv`` lattice of ``u + iv``.

    Tangents come from Cauchy-Riemann (``X_u = Re f'``, ``X_v = -Im f'``),
    second derivatives from ``f''``.  ``H_fd`` repeats the mean curvature from
    finite differences of positions alone.
    """
    if nu < 2 or nv < 2:
        raise ValueError("grid needs at least 2 x 2 nodes")
    f, met = curve.f, curve.metric
    u = np.linspace(u_range[0], u_range[1], nu)
    v = np.linspace(v_range[0], v_range[1], nv)
    W = u[:, None] + 1j * v[None, :]
    if not np.all(curve.domain.contains(W)):
        raise OutOfDomain("patch leaves the disc of convergence")
    f1 = f.derivative()
    f2 = f1.derivative()
    X = np.real(f(W))
    p1 = f1(W)
    p2 = f2(W)
    margin = _margin(met, p1)
    if np.any(margin <= margin_tol):
        raise DegenerateNormal(f"immersion margin <= {margin_tol} at some node")
    sign = _orientation(curve)
    xu, xv = np.real(p1), -np.imag(p1)
    xuu, xuv, xvv = np.real(p2), -np.imag(p2), -np.real(p2)
    E, F, G, N, H = _frame(met, xu, xv, xuu, xuv, xvv, sign, margin_tol)
    h = FD_STEP * min(1.0, curve.domain.radius)
    *_, H_fd = _frame(met, *_fd_derivatives(f, W, h), sign, margin_tol)
    return SurfacePatch(u, v, X, N, E, F, G, H, H_fd, margin, met)


def harmonicity_residual(curve: IsotropicCurve, patch: SurfacePatch) -> float:
    """Relative compact 9-point Laplacian of the positions at interior nodes.

    Uses the grid step ``h = min(du, dv)``.  For harmonic functions the
    compact stencil is accurate to ``O(h^6)``, so it measures harmonicity
    rather than discretisation error.  Normalised by the size of the second
    derivatives it cancels.
    """
    u, v = patch.u, patch.v
    if len(u) < 3 or len(v) < 3:
        return 0.0
    h = min(u[1] - u[0], v[1] - v[0])
    W = u[1:-1, None] + 1j * v[None, 1:-1]
    X = {}
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            X[i, j] = np.real(_eval_unchecked(curve.f, W + h * (i + 1j * j)))
    edge = X[1, 0] + X[-1, 0] + X[0, 1] + X[0, -1]
    corner = X[1, 1] + X[1, -1] + X[-1, 1] + X[-1, -1]
    lap = (4 * edge + corner - 20 * X[0, 0]) / (6 * h * h)
    second = np.maximum(np.abs(X[1, 0] - 2 * X[0, 0] + X[-1, 0]),
                        np.abs(X[0, 1] - 2 * X[0, 0] + X[0, -1])) / (h * h)
    diam = max(u[-1] - u[0], v[-1] - v[0])
    scale = max(float(second.max()), float(np.abs(patch.positions).max()) / diam**2, 1e-300)
    return float(np.abs(lap).max()) / scale


def boundary_residuals(curve: IsotropicCurve, a: AnalyticMap, n: AnalyticMap,
                       samples: int = 200) -> tuple[float, float]:
    """``max |Re f(u) - a(u)|`` and ``max |N(u, 0) - n(u)|`` over samples of I."""
    u = curve.domain.interval_samples(samples)
    pos = float(np.max(np.abs(np.real(curve.f(u)) - np.real(a(u)))))
    f1 = curve.f.derivative()(u)
    xu, xv = np.real(f1), -np.imag(f1)
    raw = _m.cross(curve.metric, xu, xv) * _orientation(curve)
    q = np.abs(_m.inner(curve.metric, raw, raw))
    N = raw / np.sqrt(q)[:, None]
    return pos, float(np.max(np.abs(N - np.real(n(u)))))
