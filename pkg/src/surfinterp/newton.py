"""Linearized inversion of ``(V, d) -> (a' + i d0') V + i d`` and chord Newton.

Write ``A = a' + i e'`` with ``e = twist * d0`` so that both metrics share the
form ``f = a + i e``.  Given ``s`` with ``s(u0) = 0`` and ``Re s'`` in the
plane spanned by ``a'`` and ``e'`` along ``I``, the unique ``(V, d)`` with
``V(u0) = d(u0) = 0`` and ``d`` real on ``I`` is built in four pointwise steps:

1. ``Vt = Vt1 + i Vt2`` solves ``a' Vt1 - e' Vt2 = Re s'`` (so ``A Vt - s'``
   is purely imaginary on ``I``);
2. ``m = m1 + i m2`` solves ``a' m1 - e' m2 = a'' Re V - e'' Im V`` with
   ``V = int (Vt - m)`` (a Volterra fixed point, iterated to convergence);
3. ``F = (a'' + i e'') V - A m`` is purely imaginary on ``I``;
4. ``d = int (i F - i (s' - A Vt))``.

Every pointwise quantity is defined on ``I`` by real data.  Its analytic
extension is obtained by solving the same equations with the real-analytic
extensions of that data (series with the real parts of the coefficients) at
points of a circle inside the disc, then refitting.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analytic import (
    AnalyticMap,
    compose_near_identity,
    is_real_on_interval,
    refit,
    series_cross,
    sup_norm,
)
from .errors import (
    DegeneratePlane,
    DomainEscape,
    ImageEscapesDomain,
    NoConvergence,
    NotInJn,
    ReFNotZero,
    RefitResidualTooLarge,
)
from .metric import Metric

JN_TOL = 1e-9
PLANE_TOL = 1e-10
REFIT_TOL = 1e-9
RE_F_TOL = 1e-8
RESIDUAL_TOL = 1e-9
PICARD_MAX = 80
ROUNDOFF_FLOOR = 1e-6


@dataclass(frozen=True)
class LinearizedProblem:
    a: AnalyticMap
    d0: AnalyticMap
    s: AnalyticMap
    metric: Metric = Metric.LORENTZ

    @property
    def domain(self):
        return self.a.domain

    @property
    def delta(self) -> AnalyticMap:
        """Euclidean normal ``d0' x a'`` of the tangent plane along ``I``."""
        return series_cross(Metric.EUCLIDEAN, self.d0.derivative(), self.a.derivative())


@dataclass(frozen=True)
class LinearizedSolution:
    V: AnalyticMap
    d_tilde: AnalyticMap
    V_tilde: AnalyticMap
    m: AnalyticMap
    F: AnalyticMap
    residual: float
    jn_residual: float
    pivots: tuple = ()


@dataclass
class NewtonState:
    gamma: AnalyticMap
    d: AnalyticMap
    residual_history: list = field(default_factory=list)
    converged: bool = False
    boundary_residual: float = float("nan")
    reality_residual: float = float("nan")

    @property
    def iterations(self) -> int:
        return max(len(self.residual_history) - 1, 0)


def _pivot_index(delta, pivot):
    if pivot == "max":
        return np.argmax(np.abs(delta), axis=-1)
    if pivot in (0, 1, 2):
        return np.full(delta.shape[:-1], pivot)
    raise ValueError(f"pivot must be 'max' or 0, 1, 2; got {pivot!r}")


def plane_solve(p, q, rhs, pivot="max"):
    """Solve ``p x - q y = rhs`` for scalars ``x, y`` at every sample.

    ``p, q, rhs`` have shape ``(M, 3)``.  Two of the three equations are used:
    those complementary to the pivot coordinate of ``q x p`` (the largest
    component by default, ties to the lowest index).  Returns ``x, y`` and the
    absolute determinant at each sample.
    """
    normal = np.cross(q, p)
    i = _pivot_index(normal, pivot)
    j = np.where(i == 0, 1, 0)
    k = np.where(i == 2, 1, 2)
    rows = np.arange(p.shape[0])
    pj, pk = p[rows, j], p[rows, k]
    qj, qk = q[rows, j], q[rows, k]
    rj, rk = rhs[rows, j], rhs[rows, k]
    det = qj * pk - pj * qk
    safe = np.where(det == 0, 1.0, det)
    x = (qj * rk - rj * qk) / safe
    y = (pj * rk - pk * rj) / safe
    return x, y, np.abs(det)


class _PointwiseSolver:
    """Solves ``a' x - e' y = g`` with real-analytic data at complex points."""

    def __init__(self, a1: AnalyticMap, e1: AnalyticMap, pivot):
        self.a1 = a1.real_extension()
        self.e1 = e1.real_extension()
        self.pivot = pivot
        self.min_det = np.inf

    def __call__(self, g: AnalyticMap, w, check_plane: bool = True):
        x, y, det = plane_solve(self.a1(w), self.e1(w), g(w), self.pivot)
        if check_plane:
            self.min_det = min(self.min_det, float(det.min()))
            if det.min() < PLANE_TOL:
                raise DegeneratePlane(
                    f"tangent plane degenerates inside the disc (|Delta_i| = {det.min():.2e})")
        return x + 1j * y

    def fit(self, g: AnalyticMap, degree: int, what: str, floor: float = 0.0) -> AnalyticMap:
        out = refit(lambda w: self(g, w), g.domain, degree, tol=None, what=what)
        # the refit is only trusted on I if it matches the direct real solve there
        u = g.domain.interval_samples(4 * (degree + 1), chebyshev=True)
        direct = self(g, u)
        scale = max(float(np.max(np.abs(direct))), floor, 1e-300)
        err = float(np.max(np.abs(out(u) - direct))) / scale
        if err > REFIT_TOL:
            raise RefitResidualTooLarge(f"{what}: refit misses the pointwise solve by {err:.2e}")
        return out


def _zero(domain, degree, ncomp=1):
    return AnalyticMap.constant(domain, [0.0] * ncomp if ncomp > 1 else 0.0, degree)


def linearized_solve(lp: LinearizedProblem, pivot="max") -> LinearizedSolution:
    """Return ``(V, d)`` with ``(a' + i d0') V + i d = s`` (twisted for E^3)."""
    dom = lp.domain
    sig = lp.metric.twist
    s = lp.s
    deg = max(s.degree, lp.a.degree)
    a1 = lp.a.derivative()
    e1 = (lp.d0 * sig).derivative()
    a2, e2 = a1.derivative(), e1.derivative()
    A = a1 + e1 * 1j

    u = dom.interval_samples(401)
    delta_I = np.real(np.cross(e1(u), a1(u)))
    biggest = np.max(np.abs(delta_I), axis=-1)
    if biggest.min() < PLANE_TOL:
        raise DegeneratePlane(f"Delta vanishes on I near u = {u[np.argmin(biggest)]:.6g}")

    s_scale = sup_norm(s).value
    if s_scale == 0.0:
        z = _zero(dom, deg)
        return LinearizedSolution(z, _zero(dom, deg, 3), z, z, _zero(dom, deg, 3), 0.0, 0.0)

    # roundoff in s is relative to the base map, not to s itself
    base_scale = sup_norm(A).value
    floor = ROUNDOFF_FLOOR * base_scale
    tau = s.derivative()
    rt = np.real(tau(u))
    tscale = max(float(np.max(np.abs(rt))), floor, 1e-300)
    jn = float(np.max(np.abs(np.sum(delta_I * rt, axis=-1)) / (np.linalg.norm(delta_I, axis=-1) * tscale)))
    if jn > JN_TOL:
        raise NotInJn(f"Re s' leaves the tangent plane: relative defect {jn:.2e}")
    s_center = s(dom.center)
    if np.max(np.abs(s_center)) > JN_TOL * max(s_scale, floor):
        raise NotInJn(f"s(u0) = {np.max(np.abs(s_center)):.2e} must vanish")
    s = s - s_center

    solver = _PointwiseSolver(a1, e1, pivot)
    # V~ and m are O(1) multiples of s'/A, so their noise floor is absolute
    Vt = solver.fit(tau.real_extension(), deg, "V~", ROUNDOFF_FLOOR)

    # Volterra fixed point for m
    V = Vt.antiderivative().with_degree(deg)
    m = _zero(dom, deg)
    for _ in range(PICARD_MAX):
        rhs = a2 * V.real_extension() - e2 * V.imag_extension()
        m_next = solver.fit(rhs, deg, "m", ROUNDOFF_FLOOR)
        V_next = (Vt - m_next).antiderivative().with_degree(deg)
        change = sup_norm(V_next - V).value
        V, m = V_next, m_next
        if change <= 1e-14 * max(sup_norm(V).value, 1e-300):
            break
    else:
        raise NoConvergence("fixed point for m did not settle")

    F = (a2 + e2 * 1j) * V - A * m
    left = np.abs((a2 + e2 * 1j)(u) * V(u)[:, None]) + np.abs(A(u) * m(u)[:, None])
    f_scale = max(float(left.max()), 1e-300)
    re_f = float(np.max(np.abs(np.real(F(u))))) / f_scale
    if re_f > RE_F_TOL:
        raise ReFNotZero(f"Re F on I is {re_f:.2e} relative; the base is not planar enough")

    d_tt = (tau - A * Vt) * (-1j)
    d_eff = (F * 1j + d_tt).antiderivative().with_degree(deg)

    recon = A * V + d_eff * 1j - lp.s
    residual = sup_norm(recon).value
    scale = max(s_scale, sup_norm(A * V).value, sup_norm(d_eff).value, floor)
    if residual > RESIDUAL_TOL * scale:
        raise RefitResidualTooLarge(f"reconstruction residual {residual:.2e} too large")
    return LinearizedSolution(V, d_eff * sig, Vt, m, F, residual, jn,
                              (pivot, solver.min_det))


# ---------------------------------------------------------------------------


def chord_newton(C, a: AnalyticMap, d0: AnalyticMap, metric: Metric = Metric.LORENTZ,
                 max_iter: int = 20, tol: float = 1e-9, pivot="max") -> NewtonState:
    """Find ``gamma = id + V`` and ``d`` real on ``I`` with ``(a + i d) o gamma = C``.

    The derivative is frozen at ``(id, d0)``.  ``C`` may be an
    :class:`~surfinterp.bjorling.IsotropicCurve` or a bare series; the
    twist of ``metric`` applies (``a - i d`` for minimal surfaces).
    """
    target = getattr(C, "f", C)
    dom = a.domain
    deg = a.degree
    sig = metric.twist
    gamma = AnalyticMap.identity(dom, deg)
    d = d0.with_degree(deg)
    state = NewtonState(gamma, d)
    for k in range(max_iter + 1):
        try:
            current = compose_near_identity(a + d * (1j * sig), gamma)
        except ImageEscapesDomain as exc:
            raise DomainEscape(str(exc)) from None
        r = target - current
        res = sup_norm(r).value
        hist = state.residual_history
        if hist and not res < hist[-1]:
            hist.append(res)
            raise NoConvergence(f"residual rose to {res:.3e} at iteration {k}")
        hist.append(res)
        if res < tol:
            state.converged = True
            break
        if k == max_iter:
            raise NoConvergence(f"residual {res:.3e} after {max_iter} iterations")
        step = linearized_solve(LinearizedProblem(a, d0, r, metric), pivot)
        gamma = (gamma + step.V).with_degree(deg)
        d = (d + step.d_tilde).with_degree(deg)
        state.gamma, state.d = gamma, d

    u = dom.interval_samples(401)
    state.reality_residual = float(np.max(np.abs(np.imag(d(u)))))
    if not is_real_on_interval(d, 1e-9):
        raise NoConvergence(f"recovered d is not real on I ({state.reality_residual:.2e})")
    lhs = np.real(current(u))
    state.boundary_residual = float(np.max(np.abs(lhs - np.real(target(u)))))
    return state
