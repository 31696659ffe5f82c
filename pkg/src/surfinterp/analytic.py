"""Truncated power series on a disc, standing in for analytic maps.

An :class:`AnalyticMap` holds Taylor coefficients about a real center ``u0``
for one or three components.  The series is only trusted on the closed disc of
radius ``R`` declared by its :class:`DiscDomain`; evaluation at a complex point
inside that disc is the analytic continuation of the real-analytic curve on
the interval ``I = [u0 - r, u0 + r]``.

Because the center is real, the restriction ``Re f|_I`` has Taylor
coefficients ``Re c_k``.  :meth:`AnalyticMap.real_extension` returns exactly
that series, i.e. the analytic extension of the real part on ``I``.  Several
algorithms downstream lean on this.

Non-polynomial operations (composition, normalisation) are carried out by
sampling on a circle of radius ``0.9 R`` and refitting, which for equispaced
samples is a discrete Fourier transform.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from . import metric as _metric
from .errors import (
    DomainMismatch,
    ImageEscapesDomain,
    OutOfDomain,
    RefitResidualTooLarge,
    TruncationInsufficient,
)
from .metric import Metric

DEFAULT_DEGREE = 48
SUP_SAMPLES = 256
SUP_SAFETY = 1.05
REFIT_RADIUS_FRACTION = 0.9
TAIL_WINDOW = 8
TAIL_MAX_RATIO = 0.95
# relative size below which trailing coefficients count as roundoff
ROUNDOFF_LEVEL = 1e-13
# evaluation tolerance on the disc boundary
_EDGE_SLACK = 1e-9


@dataclass(frozen=True)
class DiscDomain:
    """Disc of radius ``radius`` about the real point ``center``.

    ``half_width`` is the half length of the real interval ``I`` the curves
    are given on; it must lie strictly inside the disc.
    """

    center: float
    radius: float
    half_width: float

    def __post_init__(self):
        for name in ("center", "radius", "half_width"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if not 0 < self.half_width < self.radius:
            raise ValueError("need 0 < half_width < radius")

    @property
    def interval(self) -> tuple[float, float]:
        return (self.center - self.half_width, self.center + self.half_width)

    def interval_samples(self, n: int = 201, chebyshev: bool = False) -> np.ndarray:
        if chebyshev:
            k = np.arange(n)
            x = -np.cos(np.pi * (k + 0.5) / n)
            return self.center + self.half_width * x
        return np.linspace(*self.interval, n)

    def circle(self, m: int, rho: float | None = None) -> np.ndarray:
        rho = self.radius if rho is None else rho
        theta = 2 * np.pi * np.arange(m) / m
        return self.center + rho * np.exp(1j * theta)

    def disc_grid(self, n: int = 64) -> np.ndarray:
        """An ``n x n`` Cartesian lattice clipped to the closed disc."""
        s = np.linspace(-self.radius, self.radius, n)
        x, y = np.meshgrid(s, s, indexing="ij")
        z = (x + 1j * y).ravel()
        return self.center + z[np.abs(z) <= self.radius]

    def contains(self, w, slack: float = _EDGE_SLACK) -> np.ndarray:
        return np.abs(np.asarray(w) - self.center) <= self.radius * (1 + slack)


class AnalyticMap:
    """Truncated Taylor series ``sum_k c_k (w - u0)^k`` with 1 or 3 components.

    Arithmetic operators act coefficientwise; ``*`` is the truncated Cauchy
    product, broadcasting a scalar map over the components of a vector map.
    Instances are immutable.
    """

    __slots__ = ("domain", "coeffs", "refit_residual")

    def __init__(self, domain: DiscDomain, coeffs, refit_residual: float | None = None):
        c = np.array(coeffs, dtype=complex)
        if c.ndim == 1:
            c = c[None, :]
        if c.ndim != 2 or c.shape[0] not in (1, 3) or c.shape[1] < 1:
            raise ValueError(f"coefficients must have shape (1|3, N+1), got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        c.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "refit_residual", refit_residual)

    def __setattr__(self, name, value):
        raise AttributeError("AnalyticMap is immutable")

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, domain, value, degree: int = DEFAULT_DEGREE):
        value = np.atleast_1d(np.asarray(value, dtype=complex))
        c = np.zeros((value.size, degree + 1), dtype=complex)
        c[:, 0] = value
        return cls(domain, c)

    @classmethod
    def identity(cls, domain, degree: int = DEFAULT_DEGREE):
        c = np.zeros((1, degree + 1), dtype=complex)
        c[0, 0] = domain.center
        if degree >= 1:
            c[0, 1] = 1.0
        return cls(domain, c)

    @classmethod
    def offset(cls, domain, degree: int = DEFAULT_DEGREE):
        """The map ``w - u0``."""
        c = np.zeros((1, degree + 1), dtype=complex)
        if degree >= 1:
            c[0, 1] = 1.0
        return cls(domain, c)

    @classmethod
    def stack(cls, parts):
        parts = list(parts)
        if len(parts) != 3 or any(p.ncomp != 1 for p in parts):
            raise ValueError("stack needs exactly three scalar maps")
        _same_domain(*parts)
        n = max(p.degree for p in parts)
        return cls(parts[0].domain, np.vstack([p.with_degree(n).coeffs for p in parts]))

    # -- basic properties ---------------------------------------------------

    @property
    def ncomp(self) -> int:
        return self.coeffs.shape[0]

    @property
    def is_vector(self) -> bool:
        return self.ncomp == 3

    @property
    def degree(self) -> int:
        return self.coeffs.shape[1] - 1

    def __repr__(self):
        d = self.domain
        return (f"AnalyticMap(ncomp={self.ncomp}, degree={self.degree}, "
                f"center={d.center}, radius={d.radius})")

    def component(self, i: int) -> "AnalyticMap":
        return AnalyticMap(self.domain, self.coeffs[i])

    def __getitem__(self, i):
        return self.component(i)

    def with_degree(self, n: int) -> "AnalyticMap":
        if n == self.degree:
            return self
        c = np.zeros((self.ncomp, n + 1), dtype=complex)
        m = min(n, self.degree) + 1
        c[:, :m] = self.coeffs[:, :m]
        return AnalyticMap(self.domain, c)

    def real_extension(self) -> "AnalyticMap":
        """Analytic extension of ``Re f`` restricted to the real interval."""
        return AnalyticMap(self.domain, self.coeffs.real)

    def imag_extension(self) -> "AnalyticMap":
        """Analytic extension of ``Im f`` restricted to the real interval."""
        return AnalyticMap(self.domain, self.coeffs.imag)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        t = w - self.domain.center
        if np.any(np.abs(t) > self.domain.radius * (1 + _EDGE_SLACK)):
            worst = float(np.max(np.abs(t)))
            raise OutOfDomain(
                f"|w - u0| = {worst:.6g} exceeds disc radius {self.domain.radius}")
        acc = np.zeros(t.shape + (self.ncomp,), dtype=complex)
        for ck in self.coeffs.T[::-1]:
            acc = acc * t[..., None] + ck
        return acc if self.is_vector else acc[..., 0]

    # -- calculus -----------------------------------------------------------

    def derivative(self) -> "AnalyticMap":
        if self.degree < 1:
            raise ValueError("derivative needs degree >= 1")
        k = np.arange(1, self.degree + 1)
        return AnalyticMap(self.domain, self.coeffs[:, 1:] * k)

    def antiderivative(self) -> "AnalyticMap":
        """Primitive vanishing at the center; degree grows by one."""
        n = self.degree + 1
        c = np.zeros((self.ncomp, n + 1), dtype=complex)
        c[:, 1:] = self.coeffs / np.arange(1, n + 1)
        return AnalyticMap(self.domain, c)

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, AnalyticMap):
            _same_domain(self, other)
            return other
        if np.isscalar(other):
            return AnalyticMap.constant(self.domain, complex(other), self.degree)
        arr = np.asarray(other, dtype=complex)
        if arr.shape == (3,):
            return AnalyticMap.constant(self.domain, arr, self.degree)
        return NotImplemented

    def _binary(self, other, op):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(self.degree, other.degree)
        a = self.with_degree(n).coeffs
        b = other.with_degree(n).coeffs
        return AnalyticMap(self.domain, op(a, b))

    def __add__(self, other):
        return self._binary(other, operator.add)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return self._binary(other, operator.sub)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __neg__(self):
        return AnalyticMap(self.domain, -self.coeffs)

    def __mul__(self, other):
        if np.isscalar(other):
            return AnalyticMap(self.domain, self.coeffs * complex(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(self.degree, other.degree)
        a = self.with_degree(n).coeffs
        b = other.with_degree(n).coeffs
        if a.shape[0] != b.shape[0] and 1 not in (a.shape[0], b.shape[0]):
            raise ValueError("component counts do not broadcast")
        rows = max(a.shape[0], b.shape[0])
        a = np.broadcast_to(a, (rows, n + 1))
        b = np.broadcast_to(b, (rows, n + 1))
        out = np.array([np.convolve(x, y)[: n + 1] for x, y in zip(a, b)])
        return AnalyticMap(self.domain, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if np.isscalar(other):
            return AnalyticMap(self.domain, self.coeffs / complex(other))
        if isinstance(other, AnalyticMap) and other.ncomp == 1:
            return self * power(other, -1.0)
        return NotImplemented


def _same_domain(*maps):
    first = maps[0].domain
    for m in maps[1:]:
        if m.domain != first:
            raise DomainMismatch(f"domains differ: {first} vs {m.domain}")


# ---------------------------------------------------------------------------
# functional interface


def eval(f: AnalyticMap, w):  # noqa: A001 - mirrors the operation name
    return f(w)


def derivative(f: AnalyticMap) -> AnalyticMap:
    return f.derivative()


def antiderivative(f: AnalyticMap) -> AnalyticMap:
    return f.antiderivative()


_ARITH = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
}


def series_arith(op: str, f: AnalyticMap, g) -> AnalyticMap:
    """``add``, ``sub``, ``mul`` of two maps, or ``scale`` by a number."""
    if op == "scale":
        if not np.isscalar(g):
            raise TypeError("scale needs a number")
        return f * g
    if op not in _ARITH:
        raise ValueError(f"unknown series operation {op!r}")
    if not isinstance(g, AnalyticMap):
        raise TypeError("operand must be an AnalyticMap")
    _same_domain(f, g)
    return _ARITH[op](f, g)


def series_inner(metric: Metric, f: AnalyticMap, g: AnalyticMap) -> AnalyticMap:
    """Bilinear inner product of two vector series, as a scalar series."""
    sig = metric.signature
    out = f[0] * g[0] * sig[0]
    for i in (1, 2):
        out = out + f[i] * g[i] * sig[i]
    return out


def series_cross(metric: Metric, f: AnalyticMap, g: AnalyticMap) -> AnalyticMap:
    c0 = f[1] * g[2] - f[2] * g[1]
    c1 = f[2] * g[0] - f[0] * g[2]
    c2 = f[0] * g[1] - f[1] * g[0]
    if metric is Metric.LORENTZ:
        c2 = -c2
    return AnalyticMap.stack([c0, c1, c2])


def power(f: AnalyticMap, alpha: float) -> AnalyticMap:
    """Series of ``f**alpha`` on the branch with ``f(u0)**alpha`` principal.

    Uses the recurrence from ``f h' = alpha f' h``.  Only meaningful when
    ``f`` has no zero in the disc; check the result with :func:`tail_estimate`.
    """
    if f.ncomp != 1:
        raise ValueError("power needs a scalar series")
    g = f.coeffs[0]
    if g[0] == 0:
        raise ZeroDivisionError("series vanishes at the center")
    n = f.degree
    h = np.zeros(n + 1, dtype=complex)
    h[0] = g[0] ** alpha
    for k in range(1, n + 1):
        j = np.arange(1, k + 1)
        h[k] = np.sum(((alpha + 1) * j - k) * g[j] * h[k - j]) / (k * g[0])
    return AnalyticMap(f.domain, h)


# ---------------------------------------------------------------------------
# truncation and refitting


class TailEstimate(NamedTuple):
    bound: float
    ratio: float
    roundoff: bool


def _weighted_magnitudes(f: AnalyticMap) -> np.ndarray:
    k = np.arange(f.degree + 1)
    return np.max(np.abs(f.coeffs), axis=0) * f.domain.radius ** k


def tail_estimate(f: AnalyticMap) -> TailEstimate:
    """Estimate the size on the closed disc of the discarded series tail.

    Fits geometric decay ``q`` to the last eight weighted coefficients
    ``|c_k| R^k``; the bound is ``|c_N| R^N q / (1 - q)``.  Trailing
    coefficients at roundoff level relative to the series are reported as such
    and accepted regardless of their apparent decay.
    """
    if f.degree < TAIL_WINDOW:
        # too short to have been truncated: an exact polynomial
        return TailEstimate(0.0, 0.0, True)
    mags = _weighted_magnitudes(f)
    scale = float(mags.max())
    last = mags[-TAIL_WINDOW:]
    if scale == 0.0 or last.max() <= ROUNDOFF_LEVEL * scale:
        return TailEstimate(float(last.sum()), 0.0, True)
    k = np.arange(f.degree + 1)[-TAIL_WINDOW:]
    nz = last > 1e-300
    if nz.sum() < 2:
        return TailEstimate(float(last.max()), float("nan"), False)
    slope, intercept = np.polyfit(k[nz], np.log(last[nz]), 1)
    q = float(np.exp(slope))
    if q >= 1.0:
        return TailEstimate(float("inf"), q, False)
    m_n = max(float(last[-1]), float(np.exp(intercept + slope * k[-1])))
    return TailEstimate(m_n * q / (1 - q), q, False)


def check_truncation(f: AnalyticMap, tol: float = 1e-10, what: str = "series") -> TailEstimate:
    """Raise :class:`TruncationInsufficient` unless the tail is negligible."""
    est = tail_estimate(f)
    if est.roundoff:
        return est
    scale = max(float(_weighted_magnitudes(f).max()), 1.0)
    if not est.ratio < TAIL_MAX_RATIO or not est.bound < tol * scale:
        raise TruncationInsufficient(
            f"{what}: tail bound {est.bound:.3e} (decay ratio {est.ratio:.3f}) "
            f"exceeds tolerance at degree {f.degree}")
    return est


def refit(func: Callable, domain: DiscDomain, degree: int = DEFAULT_DEGREE,
          samples: int | None = None, rho_fraction: float = REFIT_RADIUS_FRACTION,
          tol: float | None = 1e-10, what: str = "refit") -> AnalyticMap:
    """Fit a series to ``func`` sampled on a circle of radius ``rho < R``.

    ``func`` maps an array of complex points to values of shape ``(M,)`` or
    ``(M, 3)``.  With equispaced samples the least-squares fit is a discrete
    Fourier transform.  The relative residual at the sample points is stored
    on the result; it exceeds ``tol`` only when the function carries
    significant content beyond the truncation degree.
    """
    m = samples or 4 * (degree + 1)
    rho = rho_fraction * domain.radius
    w = domain.circle(m, rho)
    vals = np.asarray(func(w), dtype=complex)
    vector = vals.ndim == 2
    vals2 = vals if vector else vals[:, None]
    spec = np.fft.fft(vals2, axis=0) / m
    k = np.arange(degree + 1)
    coeffs = (spec[: degree + 1] / rho ** k[:, None]).T
    fitted = AnalyticMap(domain, coeffs if vector else coeffs[0])
    back = fitted(w)
    back2 = back if vector else back[:, None]
    scale = max(float(np.max(np.abs(vals2))), 1e-300)
    residual = float(np.max(np.abs(back2 - vals2))) / scale
    if tol is not None and residual > tol:
        raise RefitResidualTooLarge(f"{what}: relative refit residual {residual:.3e} > {tol:.1e}")
    return AnalyticMap(domain, fitted.coeffs if vector else fitted.coeffs[0],
                       refit_residual=residual)


def compose_near_identity(f: AnalyticMap, gamma: AnalyticMap, samples: int | None = None,
                          rho_fraction: float = REFIT_RADIUS_FRACTION,
                          tol: float | None = 1e-10) -> AnalyticMap:
    """Series of ``f o gamma`` for a scalar ``gamma`` close to the identity."""
    if gamma.ncomp != 1:
        raise ValueError("gamma must be scalar")
    _same_domain(f, gamma)
    dom = f.domain
    m = samples or 4 * (f.degree + 1)
    w = dom.circle(m, rho_fraction * dom.radius)
    z = gamma(w)
    reach = float(np.max(np.abs(z - dom.center)))
    if reach >= dom.radius:
        raise ImageEscapesDomain(
            f"gamma maps the sampling circle to radius {reach:.6g} >= {dom.radius}")
    return refit(lambda pts: f(gamma(pts)), dom, f.degree, m, rho_fraction, tol,
                 what="composition")


# ---------------------------------------------------------------------------
# norms and predicates


class SupNorm(NamedTuple):
    value: float
    sample_count: int


def sup_norm(f: AnalyticMap, samples: int = SUP_SAMPLES, safety: float = SUP_SAFETY) -> SupNorm:
    """Sup over the closed disc, largest component, via the boundary circle.

    By the maximum modulus principle the sup is attained on the boundary; the
    safety factor covers peaks between samples.  Only the varying part needs
    that cover, so per component the bound is the smaller of
    ``safety * max|f|`` and ``|f(u0)| + safety * max|f - f(u0)|``; both are
    upper bounds and a constant map gets its exact value.
    """
    if samples < 64:
        raise ValueError("sup_norm needs at least 64 samples")
    vals = f(f.domain.circle(samples))
    vals = vals if vals.ndim == 2 else vals[:, None]
    c0 = f.coeffs[:, 0]
    whole = safety * np.abs(vals).max(axis=0)
    split = np.abs(c0) + safety * np.abs(vals - c0).max(axis=0)
    return SupNorm(float(np.minimum(whole, split).max()), samples)


def is_real_on_interval(f: AnalyticMap, tol: float = 1e-9, samples: int = 401) -> bool:
    """Both the coefficients and dense samples of ``I`` must be real to ``tol``."""
    coeff_ok = float(np.max(np.abs(f.coeffs.imag))) < tol
    u = f.domain.interval_samples(samples)
    sample_ok = float(np.max(np.abs(np.imag(f(u))))) < tol
    return coeff_ok and sample_ok


def spacelike_margin(c: AnalyticMap, samples: int = 401) -> float:
    """``min_I <c', c'>_L`` on the real parts; positive means spacelike on I."""
    if not c.is_vector:
        raise ValueError("spacelike_margin needs a 3-component curve")
    u = c.domain.interval_samples(samples)
    v = np.real(c.derivative()(u))
    return float(np.min(_metric.inner(Metric.LORENTZ, v, v)))
