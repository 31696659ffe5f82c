import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from surfinterp.analytic import DiscDomain
from surfinterp.curves import builtin_curve
from surfinterp.metric import Metric, cross, inner, normalize_timelike

settings.register_profile(
    "default", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

GALLERY_DOMAIN = DiscDomain(math.pi, 3.5, math.pi)
UNIT_DOMAIN = DiscDomain(0.0, 1.0, 0.8)
ENNEPER_DOMAIN = DiscDomain(0.0, 0.5, 0.4)


def curve(spec, dom=GALLERY_DOMAIN, degree=48):
    return builtin_curve(spec, dom, degree)


def admissible_pair(rng):
    """Random spacelike a' with a unit timelike n, <n, a'>_L = 0."""
    L = Metric.LORENTZ
    while True:
        ap = rng.normal(size=3)
        if inner(L, ap, ap) > 0.1:
            break
    e3 = np.array([0.0, 0.0, 1.0])
    nh = normalize_timelike(e3 - inner(L, e3, ap) / inner(L, ap, ap) * ap)
    m = cross(L, ap, nh)
    m = m / math.sqrt(inner(L, m, m))
    phi = rng.normal()
    return math.cosh(phi) * nh + math.sinh(phi) * m, ap


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)
