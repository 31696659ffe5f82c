"""Builtin curves with exact Taylor coefficients, and the JSON curve format.

Curve spec JSON::

    {"center": 0.0, "radius": 1.2, "interval_half_width": 1.0,
     "components": [[[re, im], ...], [[re, im], ...], [[re, im], ...]]}

Builtin names take their parameters in parentheses, e.g. ``circle(1)`` or
``perturbed-circle(1, 0.05)``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analytic import (
    DEFAULT_DEGREE,
    AnalyticMap,
    DiscDomain,
    check_truncation,
    is_real_on_interval,
    power,
    tail_estimate,
)
from .errors import ParseError, TruncationInsufficient, ValidationFailed

__all__ = [
    "Violation",
    "trig_series",
    "builtin_curve",
    "BUILTINS",
    "curve_to_json",
    "curve_from_json",
    "parse_curve_spec",
]


@dataclass(frozen=True)
class Violation:
    kind: str
    u: float | None
    magnitude: float

    def as_dict(self):
        return {"kind": self.kind, "u": self.u, "magnitude": self.magnitude}


def trig_series(domain: DiscDomain, degree: int, omega: float = 1.0,
                phase: float = 0.0) -> AnalyticMap:
    """Taylor series of ``cos(omega*w + phase)`` about the domain center."""
    k = np.arange(degree + 1)
    fact = np.array([math.factorial(int(j)) for j in k], dtype=float)
    c = omega ** k * np.cos(omega * domain.center + phase + k * np.pi / 2) / fact
    return AnalyticMap(domain, c)


def _cos(dom, n):
    return trig_series(dom, n)


def _sin(dom, n):
    return trig_series(dom, n, phase=-np.pi / 2)


def _zero(dom, n):
    return AnalyticMap.constant(dom, 0.0, n)


def _w(dom, n):
    return AnalyticMap.identity(dom, n)


def _circle(dom, n, r=1.0):
    return AnalyticMap.stack([_cos(dom, n) * r, _sin(dom, n) * r, _zero(dom, n)])


def _line(dom, n, x=1.0, y=0.0, z=0.0):
    w = _w(dom, n)
    return AnalyticMap.stack([w * x, w * y, w * z])


def _helix(dom, n, r=1.0, p=1.0):
    return AnalyticMap.stack([_cos(dom, n) * r, _sin(dom, n) * r, _w(dom, n) * p])


def _perturbed_circle(dom, n, r=1.0, eps=0.05):
    return AnalyticMap.stack([_cos(dom, n) * (r + eps), _sin(dom, n) * (r + eps),
                              _sin(dom, n) * eps])


def _spiral(dom, n, r=1.0, eps=0.01):
    radius = AnalyticMap.offset(dom, n) * eps + r
    return AnalyticMap.stack([radius * _cos(dom, n), radius * _sin(dom, n), _zero(dom, n)])


def _tilted_spiral(dom, n, r=1.0, eps=0.01, tilt=0.005):
    flat = _spiral(dom, n, r, eps)
    lift = AnalyticMap.stack([_zero(dom, n), _zero(dom, n), AnalyticMap.offset(dom, n) * tilt])
    return flat + lift


def _constant(dom, n, x=0.0, y=0.0, z=1.0):
    return AnalyticMap.constant(dom, [x, y, z], n)


def _radial(dom, n, s=1.0):
    return AnalyticMap.stack([_cos(dom, n) * s, _sin(dom, n) * s, _zero(dom, n)])


def _boosted(dom, n, theta=0.0):
    one = AnalyticMap.constant(dom, 1.0, n)
    return AnalyticMap.stack([_cos(dom, n) * math.sinh(theta), _sin(dom, n) * math.sinh(theta),
                              one * math.cosh(theta)])


def _enneper_curve(dom, n):
    w = _w(dom, n)
    return AnalyticMap.stack([w - w * w * w * (1 / 3), _zero(dom, n), w * w])


def _enneper_normal(dom, n):
    w = _w(dom, n)
    inv = power(w * w + 1.0, -1.0)
    return AnalyticMap.stack([w * inv * 2.0, _zero(dom, n), (w * w - 1.0) * inv])


BUILTINS = {
    "circle": _circle,
    "line": _line,
    "helix": _helix,
    "perturbed-circle": _perturbed_circle,
    "spiral": _spiral,
    "tilted-spiral": _tilted_spiral,
    "constant": _constant,
    "radial": _radial,
    "boosted": _boosted,
    "enneper-curve": _enneper_curve,
    "enneper-normal": _enneper_normal,
}

_NAME_RE = re.compile(r"^\s*([a-z][a-z\-]*)\s*(?:\((.*)\))?\s*$")


def builtin_curve(spec: str, domain: DiscDomain, degree: int = DEFAULT_DEGREE) -> AnalyticMap:
    match = _NAME_RE.match(spec)
    if not match or match.group(1) not in BUILTINS:
        raise ParseError(f"unknown builtin curve {spec!r}; known: {', '.join(sorted(BUILTINS))}")
    name, argstr = match.groups()
    args = []
    if argstr and argstr.strip():
        try:
            args = [float(x) for x in argstr.split(",")]
        except ValueError:
            raise ParseError(f"bad arguments in {spec!r}") from None
    try:
        return BUILTINS[name](domain, degree, *args)
    except TypeError:
        raise ParseError(f"wrong number of arguments in {spec!r}") from None


def curve_to_json(f: AnalyticMap) -> dict:
    d = f.domain
    return {
        "center": d.center,
        "radius": d.radius,
        "interval_half_width": d.half_width,
        "components": [[[float(c.real), float(c.imag)] for c in row] for row in f.coeffs],
    }


def curve_from_json(obj) -> AnalyticMap:
    if not isinstance(obj, dict):
        raise ParseError("curve spec must be a JSON object")
    for key in ("center", "radius", "interval_half_width", "components"):
        if key not in obj:
            raise ParseError(f"missing field {key!r}")
    try:
        domain = DiscDomain(float(obj["center"]), float(obj["radius"]),
                            float(obj["interval_half_width"]))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad domain fields: {exc}") from None
    comps = obj["components"]
    if not isinstance(comps, list) or len(comps) not in (1, 3):
        raise ParseError("field 'components' must list 1 or 3 coefficient arrays")
    rows = []
    for i, row in enumerate(comps):
        try:
            vals = [complex(float(p[0]), float(p[1])) for p in row]
        except (TypeError, ValueError, IndexError):
            raise ParseError(f"field 'components[{i}]' must be a list of [re, im] pairs") from None
        if not vals:
            raise ParseError(f"field 'components[{i}]' is empty")
        rows.append(vals)
    n = max(len(r) for r in rows)
    coeffs = np.zeros((len(rows), n), dtype=complex)
    for i, r in enumerate(rows):
        coeffs[i, : len(r)] = r
    return AnalyticMap(domain, coeffs)


def load_curve_file(path) -> AnalyticMap:
    text = Path(path).read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    return curve_from_json(obj)


def curve_violations(f: AnalyticMap, role: str = "curve", tol: float = 1e-9) -> list[Violation]:
    """Load-time checks: real on I, finite tail, and (for curves) a' not zero."""
    out = []
    if not is_real_on_interval(f, tol):
        u = f.domain.interval_samples(401)
        im = np.abs(np.imag(f(u)))
        im = im.max(axis=-1) if im.ndim == 2 else im
        i = int(np.argmax(im))
        out.append(Violation("not-real-on-interval", float(u[i]), float(im[i])))
    try:
        check_truncation(f, what=role)
    except TruncationInsufficient:
        out.append(Violation("truncation", None, tail_estimate(f).bound))
    if role == "curve" and f.is_vector:
        u = f.domain.interval_samples(401)
        if f.degree == 0:
            sq = np.zeros_like(u)
        else:
            sq = np.sum(np.abs(f.derivative()(u)) ** 2, axis=-1)
        if sq.min() < 1e-10:
            i = int(np.argmin(sq))
            out.append(Violation("degenerate-tangent", float(u[i]), float(sq[i])))
    return out


def parse_curve_spec(spec: str, domain: DiscDomain | None = None,
                     degree: int = DEFAULT_DEGREE, role: str = "curve") -> AnalyticMap:
    """Resolve a builtin name or a JSON file path and validate it.

    Raises :class:`ParseError` for malformed input and :class:`ValidationFailed`
    when the loaded map breaks a load-time check.
    """
    match = _NAME_RE.match(spec)
    if match and match.group(1) in BUILTINS:
        if domain is None:
            raise ParseError("builtin curves need a domain")
        f = builtin_curve(spec, domain, degree)
    else:
        path = Path(spec)
        if not path.exists():
            if match:
                raise ParseError(f"unknown builtin curve {spec!r}; known: {', '.join(sorted(BUILTINS))}")
            raise FileNotFoundError(spec)
        f = load_curve_file(path)
    violations = curve_violations(f, role)
    if violations:
        raise ValidationFailed(violations)
    return f
