import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from surfinterp.analytic import (
    AnalyticMap,
    DiscDomain,
    check_truncation,
    compose_near_identity,
    is_real_on_interval,
    power,
    refit,
    series_arith,
    spacelike_margin,
    sup_norm,
    tail_estimate,
)
from surfinterp.analytic import eval as series_eval
from surfinterp.errors import (
    DomainMismatch,
    ImageEscapesDomain,
    OutOfDomain,
    TruncationInsufficient,
)

from conftest import curve

BIG = DiscDomain(0.0, 3.5, 1.0)
UNIT = DiscDomain(0.0, 1.0, 0.5)


def exp_series(dom, n=30, scale=1.0):
    k = np.arange(n + 1)
    c = np.array([scale**j / math.factorial(j) for j in k]) * cmath.exp(scale * dom.center)
    return AnalyticMap(dom, c)


def test_domain_invariants():
    with pytest.raises(ValueError):
        DiscDomain(0, 1, 1)
    with pytest.raises(ValueError):
        DiscDomain(0, -1, 0.5)
    assert UNIT.interval == (-0.5, 0.5)


def test_eval_exp_at_i_pi():
    f = exp_series(BIG, 30)
    assert abs(series_eval(f, 1j * math.pi) - cmath.exp(1j * math.pi)) < 1e-12


def test_eval_constant_and_identity():
    c = AnalyticMap.constant(UNIT, [1.0, 2.0, 3.0], 5)
    np.testing.assert_array_equal(c(0.3 + 0.2j), [1, 2, 3])
    ident = AnalyticMap.identity(DiscDomain(2.0, 1.0, 0.5), 4)
    assert ident(2.3 - 0.4j) == pytest.approx(2.3 - 0.4j)


def test_eval_out_of_domain():
    with pytest.raises(OutOfDomain):
        AnalyticMap.identity(UNIT)(1.5)


def test_derivative_examples():
    f = AnalyticMap(UNIT, [0, 0, 1])
    np.testing.assert_array_equal(f.derivative().coeffs[0], [0, 2])
    s = curve("circle(1)", BIG)[1]  # sin
    c = curve("circle(1)", BIG)[0]  # cos
    ds = s.derivative()
    assert np.max(np.abs(ds.coeffs[0] - c.coeffs[0][:-1])) < 1e-15


def test_antiderivative_examples():
    one = AnalyticMap.constant(UNIT, 1.0, 3)
    np.testing.assert_array_equal(one.antiderivative().coeffs[0][:2], [0, 1])
    zero = AnalyticMap.constant(UNIT, 0.0, 3)
    assert not np.any(zero.antiderivative().coeffs)
    cos = curve("circle(1)", BIG)[0]
    assert abs(cos.antiderivative()(1.0) - math.sin(1.0)) < 1e-12


def test_arith_examples():
    f = exp_series(BIG, 48)
    z = AnalyticMap.constant(BIG, 0.0, 48)
    np.testing.assert_array_equal(series_arith("add", f, z).coeffs, f.coeffs)
    t = AnalyticMap.offset(UNIT, 2)
    np.testing.assert_array_equal(series_arith("mul", t, t).coeffs[0][:3], [0, 0, 1])
    sq = series_arith("mul", f, f)
    w = BIG.disc_grid(20)
    w = w[np.abs(w) <= BIG.radius / 2]
    assert np.max(np.abs(sq(w) - np.exp(2 * w))) < 1e-10
    with pytest.raises(DomainMismatch):
        series_arith("add", f, AnalyticMap.constant(UNIT, 1.0))


def test_compose_examples():
    f = exp_series(BIG, 48)
    ident = AnalyticMap.identity(BIG, 48)
    assert np.max(np.abs(compose_near_identity(f, ident).coeffs - f.coeffs)) < 1e-12
    g = ident + AnalyticMap.offset(BIG, 48) * 0.1
    assert np.max(np.abs(compose_near_identity(ident, g).coeffs - g.coeffs)) < 1e-12
    fg = compose_near_identity(exp_series(UNIT, 48), AnalyticMap.identity(UNIT, 48) + AnalyticMap.offset(UNIT, 48) * 0.1)
    w = UNIT.disc_grid(15)
    assert np.max(np.abs(fg(w) - np.exp(w + 0.1 * w))) < 1e-10
    with pytest.raises(ImageEscapesDomain):
        compose_near_identity(f, ident * 1.5)


def test_sup_norm_examples():
    assert sup_norm(AnalyticMap.constant(UNIT, [3.0, 0.0, 0.0])).value == pytest.approx(3.0)
    assert sup_norm(AnalyticMap.identity(UNIT)).value == pytest.approx(1.05)
    d2 = DiscDomain(0.0, 2.0, 1.0)
    t = AnalyticMap.offset(d2, 2)
    assert sup_norm(t * t).value == pytest.approx(4 * 1.05)
    with pytest.raises(ValueError):
        sup_norm(t, samples=10)


def test_is_real_examples():
    cos = curve("circle(1)", BIG)[0]
    assert is_real_on_interval(cos, 1e-9)
    assert not is_real_on_interval(AnalyticMap.constant(UNIT, 1j), 1e-9)
    bumped = AnalyticMap(BIG, cos.coeffs + 1e-9j * (np.arange(49) == 3))
    assert is_real_on_interval(bumped, 1e-8)


def test_spacelike_margin_examples():
    assert spacelike_margin(curve("line(1,0,0)", UNIT)) == pytest.approx(1)
    assert spacelike_margin(curve("line(0,0,1)", UNIT)) == pytest.approx(-1)
    assert spacelike_margin(curve("circle(1)", BIG)) == pytest.approx(1)


def test_tail_estimate_monotone_in_degree():
    bounds = [tail_estimate(exp_series(BIG, n)).bound for n in (16, 24, 32, 40)]
    assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))
    sines = [tail_estimate(curve("circle(1)", BIG, n)[1]).bound for n in (16, 24, 32)]
    assert all(b2 < b1 for b1, b2 in zip(sines, sines[1:]))


def test_truncation_rejects_slow_decay():
    geometric = AnalyticMap(UNIT, 0.99 ** np.arange(49))
    with pytest.raises(TruncationInsufficient):
        check_truncation(geometric)


def test_power_matches_direct():
    f = curve("circle(1)", UNIT)[0] + 2.0
    w = UNIT.disc_grid(12)
    for alpha in (-0.5, 0.5, -1.0, 2.0):
        assert np.max(np.abs(power(f, alpha)(w) - (np.cos(w) + 2) ** alpha)) < 1e-11


def test_refit_reports_residual():
    g = refit(np.exp, UNIT, 48)
    assert g.refit_residual < 1e-13
    assert abs(g(0.3j) - cmath.exp(0.3j)) < 1e-12


coeff_lists = st.lists(st.floats(-1, 1, allow_nan=False), min_size=3, max_size=12)
points = st.tuples(st.floats(-0.7, 0.7), st.floats(-0.7, 0.7)).map(lambda t: complex(*t))


@given(coeff_lists, coeff_lists, points)
def test_eval_is_linear(c1, c2, w):
    f, g = AnalyticMap(UNIT, c1), AnalyticMap(UNIT, c2)
    assert abs((f + g)(w) - f(w) - g(w)) < 1e-14


@given(coeff_lists)
def test_derivative_antiderivative_roundtrip(c):
    f = AnalyticMap(UNIT, c)
    np.testing.assert_allclose(f.antiderivative().derivative().coeffs, f.coeffs, atol=1e-15)
    back = f.derivative().antiderivative()
    np.testing.assert_allclose(back.coeffs[0][1:], f.coeffs[0][1:], atol=1e-15)
    assert back.coeffs[0][0] == 0


@given(coeff_lists, st.lists(points, min_size=1, max_size=20))
def test_sup_norm_dominates_interior(c, ws):
    f = AnalyticMap(UNIT, c)
    bound = sup_norm(f).value
    assert all(abs(f(w)) <= bound + 1e-14 for w in ws)
