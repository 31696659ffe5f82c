"""Vector algebra in Euclidean space E^3 and Lorentz-Minkowski space L^3.

Everything here acts on the last axis of array-likes, so a single call handles
one vector or a whole grid of them.  Complex inputs are allowed: the inner
product is extended *bilinearly* (no conjugation), which is what makes
isotropic curves possible.

The Lorentzian cross product is fixed by ``<x ×_L y, z>_L = det(x, y, z)``,
which works out to the Euclidean cross product with its third component
negated.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import NotTimelike

__all__ = [
    "Metric",
    "CausalCharacter",
    "inner",
    "cross",
    "causal_character",
    "normalize_timelike",
    "lorentz_magnitude",
    "euclidean_magnitude",
]


class Metric(enum.Enum):
    EUCLIDEAN = "euclidean"
    LORENTZ = "lorentz"

    @property
    def signature(self) -> np.ndarray:
        if self is Metric.LORENTZ:
            return np.array([1.0, 1.0, -1.0])
        return np.array([1.0, 1.0, 1.0])

    @property
    def twist(self) -> int:
        """Sign in the isotropic curve ``a + i*twist*d``.

        Maximal surfaces are ``Re(a + i d)``, minimal ones ``Re(a - i d)``.
        """
        return 1 if self is Metric.LORENTZ else -1

    @property
    def unit_normal_square(self) -> float:
        """``<n, n>`` of a unit surface normal in this metric."""
        return -1.0 if self is Metric.LORENTZ else 1.0

    @classmethod
    def parse(cls, value) -> "Metric":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown metric {value!r}") from None


class CausalCharacter(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


def inner(metric: Metric, x, y):
    """Bilinear inner product ``x1 y1 + x2 y2 ± x3 y3`` over the last axis."""
    x = np.asarray(x)
    y = np.asarray(y)
    return (x * y * metric.signature).sum(axis=-1)


def cross(metric: Metric, x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    out = np.cross(x, y)
    if metric is Metric.LORENTZ:
        out = out * metric.signature
    return out


def causal_character(v, tol: float = 1e-12) -> CausalCharacter:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    q = float(np.real(inner(Metric.LORENTZ, v, v)))
    if q > tol:
        return CausalCharacter.SPACELIKE
    if q < -tol:
        return CausalCharacter.TIMELIKE
    return CausalCharacter.LIGHTLIKE


def normalize_timelike(v, tol: float = 1e-12):
    """Scale a timelike vector (or stack of them) so that ``<w, w>_L = -1``.

    The direction is preserved: the result is a positive multiple of ``v``.
    """
    v = np.asarray(v, dtype=float)
    q = inner(Metric.LORENTZ, v, v)
    if np.any(q >= -tol):
        raise NotTimelike(f"vector is not timelike: <v,v>_L = {np.max(q):.3e}")
    return v / np.sqrt(-q)[..., None]


def lorentz_magnitude(v):
    """``sqrt(|<v, v>_L|)``, the Lorentzian length regardless of causal type."""
    return np.sqrt(np.abs(inner(Metric.LORENTZ, v, v)))


def euclidean_magnitude(v):
    return np.linalg.norm(np.asarray(v), axis=-1)
