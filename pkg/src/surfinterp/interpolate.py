"""Surfaces through a pair of curves.

Given a base curve ``a`` and a nearby curve ``l``, the pair normal
``n_l = (a' x l') / |a' x l'|`` along ``l`` is admissible Björling data for
``l``; the isotropic curve ``C = l + i*twist*d_l`` with ``d_l' = n_l x l'``
describes the surface through ``l``.  Whether ``a`` lies on ``Re C`` is
checked empirically by projecting each sample of ``a`` onto the surface.
The constructive route from the base surface is :func:`chord_newton`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import metric as _m
from .analytic import (
    AnalyticMap,
    DiscDomain,
    check_truncation,
    is_real_on_interval,
    power,
    series_cross,
    series_inner,
    spacelike_margin,
    sup_norm,
)
from .bjorling import EtaBudget, IsotropicCurve, isotropy_residual
from .curves import Violation
from .errors import (
    DomainEscape,
    DomainMismatch,
    IsotropyCertificateFailed,
    NoDescent,
    NotTimelike,
    ParallelTangents,
    ValidationFailed,
)
from .metric import Metric
from .newton import (  # noqa: F401 - re-exported
    LinearizedProblem,
    LinearizedSolution,
    NewtonState,
    chord_newton,
    linearized_solve,
)

ETA_SPLIT = 0.45
EXTENSION_TOL = 1e-8


@dataclass(frozen=True)
class InterpolationProblem:
    a: AnalyticMap
    l: AnalyticMap  # noqa: E741
    metric: Metric

    @property
    def domain(self) -> DiscDomain:
        return self.a.domain

    def violations(self) -> list[Violation]:
        out = []
        if self.a.domain != self.l.domain:
            raise DomainMismatch("a and l live on different discs")
        for name, c in (("a", self.a), ("l", self.l)):
            if not is_real_on_interval(c):
                out.append(Violation(f"{name}-not-real", None, float(np.abs(c.coeffs.imag).max())))
            if self.metric is Metric.LORENTZ:
                margin = spacelike_margin(c)
                if margin <= 0:
                    out.append(Violation(f"{name}-not-spacelike", None, margin))
        return out

    def validate(self):
        v = self.violations()
        if v:
            raise ValidationFailed(v)


@dataclass(frozen=True)
class IsotropicExtension:
    n_l: AnalyticMap
    d_l: AnalyticMap
    C: IsotropicCurve
    orthogonality: float
    length_defect: float
    trace_error: float


@dataclass(frozen=True)
class ClosenessReport:
    norm_l_a: float
    norm_l_a_prime: float
    norm_d_d0: float
    norm_d_d0_prime: float
    eta: float
    eta1: float
    eta2: float
    passed: bool
    epsilon_condition: str = "not certified"

    def as_dict(self):
        return {
            "norm_l_a": self.norm_l_a,
            "norm_l_a_prime": self.norm_l_a_prime,
            "norm_d_d0": self.norm_d_d0,
            "norm_d_d0_prime": self.norm_d_d0_prime,
            "eta": self.eta,
            "eta1": self.eta1,
            "eta2": self.eta2,
            "pass": self.passed,
            "epsilon_condition": self.epsilon_condition,
        }


@dataclass(frozen=True)
class ContainmentReport:
    max_residual: float
    gamma_samples: np.ndarray
    success: bool
    tol: float


def pair_normal(p: InterpolationProblem, tol: float = 1e-8, samples: int = 401) -> AnalyticMap:
    """Unit normal to ``span(a', l')`` as a series.

    Lorentz: ``x = a' x_L l'`` is scaled by ``1/sqrt(-<x, x>_L)`` so that
    ``<n_l, n_l>_L = -1``; this requires the plane to be spacelike.
    """
    p.validate()
    a1, l1 = p.a.derivative(), p.l.derivative()
    x = series_cross(p.metric, a1, l1)
    u = p.domain.interval_samples(samples)
    xu = np.real(x(u))
    size = np.linalg.norm(xu, axis=-1)
    scale = max(float(np.max(np.linalg.norm(np.real(a1(u)), axis=-1) *
                             np.linalg.norm(np.real(l1(u)), axis=-1))), 1e-300)
    if size.min() < tol * scale:
        i = int(np.argmin(size))
        raise ParallelTangents(f"a' and l' are parallel near u = {u[i]:.6g} (|a' x l'| = {size[i]:.2e})")
    g = series_inner(p.metric, x, x)
    if p.metric is Metric.LORENTZ:
        gu = np.real(g(u))
        if gu.max() >= -tol * scale**2:
            i = int(np.argmax(gu))
            raise NotTimelike(
                f"a' x l' is not timelike near u = {u[i]:.6g} (<x,x>_L = {gu[i]:.3e}); "
                "the tangent plane of the pair is not spacelike")
        g = -g
    n = x * power(g, -0.5)
    check_truncation(n, what="pair normal")
    return n


def isotropic_extension(p: InterpolationProblem, tol: float = EXTENSION_TOL) -> IsotropicExtension:
    n = pair_normal(p)
    l1 = p.l.derivative()
    dprime = series_cross(p.metric, n, l1)
    d_l = dprime.antiderivative()
    C = p.l + d_l * (1j * p.metric.twist)

    u = p.domain.interval_samples(401)
    du, lu = np.real(dprime(u)), np.real(l1(u))
    ortho = float(np.max(np.abs(_m.inner(p.metric, du, lu))))
    length = float(np.max(np.abs(_m.inner(p.metric, du, du) - _m.inner(p.metric, lu, lu))))
    trace = float(np.max(np.abs(np.real(C(u)) - np.real(p.l(u)))))
    res = isotropy_residual(C, metric=p.metric)
    if res >= tol:
        raise IsotropyCertificateFailed(f"isotropy residual {res:.3e} >= {tol:.1e}")
    curve = IsotropicCurve(C, p.metric, res, d=d_l, reference_normal=np.real(n(p.domain.center)),
                           tolerance=tol)
    return IsotropicExtension(n, d_l, curve, ortho, length, trace)


def closeness_report(p: InterpolationProblem, ext: IsotropicExtension, d0: AnalyticMap,
                     budget: EtaBudget) -> ClosenessReport:
    """Sup-norm distances of ``(l, d_l)`` from the base ``(a, d0)``.

    ``d0`` is the imaginary-side map of the base surface, i.e. ``base.d`` for
    ``base = solve(BjorlingData(a, n0, metric))``.  The budget is split as
    ``eta1 = eta2 = 0.45 eta``.
    """
    norms = (
        sup_norm(p.l - p.a).value,
        sup_norm(p.l.derivative() - p.a.derivative()).value,
        sup_norm(ext.d_l - d0).value,
        sup_norm(ext.d_l.derivative() - d0.derivative()).value,
    )
    eta1 = eta2 = ETA_SPLIT * budget.eta
    passed = norms[0] < eta1 and norms[1] < eta1 and norms[2] < eta2 and norms[3] < eta2
    return ClosenessReport(*norms, eta=budget.eta, eta1=eta1, eta2=eta2, passed=bool(passed))


def _project(C0, C1, target, w, dom, max_iter):
    """Gauss-Newton for ``min |Re C(w) - target|`` over ``w = x + iy``."""
    r = np.real(C0(w)) - target
    err = float(np.linalg.norm(r))
    for _ in range(max_iter):
        if err < 1e-15 * (1 + float(np.linalg.norm(target))):
            break
        d = C1(w)
        J = np.stack([np.real(d), -np.imag(d)], axis=1)
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        t = 1.0
        while t > 1e-10:
            w_new = w + t * (step[0] + 1j * step[1])
            if abs(w_new - dom.center) > dom.radius:
                raise DomainEscape(f"projection left the disc at w = {w_new:.6g}")
            r_new = np.real(C0(w_new)) - target
            e_new = float(np.linalg.norm(r_new))
            if e_new < err:
                break
            t *= 0.5
        else:
            break
        w, r, err = w_new, r_new, e_new
        if abs(t * (step[0] + 1j * step[1])) < 1e-15 * (1 + abs(w)):
            break
    return w, err


def containment_check(C, a: AnalyticMap, samples: int = 50, tol: float = 1e-4,
                      max_iter: int = 50, strict: bool = True) -> ContainmentReport:
    """Project samples of ``a`` on ``I`` onto the surface ``Re C``.

    Returns the largest remaining distance and the minimizers ``w_i`` (an
    empirical reparametrization).  With ``strict`` a failure raises
    :class:`NoDescent` carrying the report.
    """
    f = getattr(C, "f", C)
    dom = f.domain
    f1 = f.derivative()
    u = dom.interval_samples(samples)
    targets = np.real(a(u))
    ws = np.empty(samples, dtype=complex)
    errs = np.empty(samples)
    for i, (ui, ti) in enumerate(zip(u, targets)):
        ws[i], errs[i] = _project(f, f1, ti, complex(ui), dom, max_iter)
    worst = float(errs.max())
    report = ContainmentReport(worst, ws, worst < tol, tol)
    if strict and not report.success:
        raise NoDescent(f"projection stalls at distance {worst:.3e} > {tol:.1e}", report)
    return report
