import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate as sint

from gsf import jet as J_
from gsf.calculus import (
    BracketViolation,
    EndpointOrderViolation,
    antiderivative,
    derivative,
    derivative_gsf,
    extreme_values,
    incremental_ratio,
    integral,
    ivt_solve,
    mvt_point,
    taylor_polynomial,
    taylor_remainder,
)
from gsf.functions import Delta, Heaviside, compose, default_b, embed, gsf_from_function
from gsf.gauge import STANDARD as G, Classification, GenNum, classify_order
from gsf.sets import Box, FunctCompact

B = default_b(G)
DELTA = embed(Delta())
H = embed(Heaviside())
CUBE = gsf_from_function(lambda x: x ** 3, name="cube")
SQ = gsf_from_function(lambda x: x * x, name="sq")


def negligible(x):
    return classify_order(x).classification is Classification.NEGLIGIBLE


def test_derivative_of_cube_at_drho():
    d = derivative(CUBE, G.drho(1))
    assert all(math.isclose(d.value(e), 3 * e * e, rel_tol=1e-14) for e in G.grid)


def test_heaviside_derivative_is_delta():
    for x in (G.const(0.0), B.reciprocal() * 0.5, G.const(0.3)):
        assert negligible(derivative(H, x) - DELTA(x))


def test_chain_rule_against_finite_differences():
    inner = gsf_from_function(lambda x: J_.sin(2 * x), name="inner")
    outer = gsf_from_function(lambda x: J_.exp(x) + x ** 2, name="outer")
    h = compose(outer, inner)
    for x0 in (-0.4, 0.7):
        d = derivative(h, x0)
        step = 1e-5
        fd = (math.exp(math.sin(2 * (x0 + step))) + math.sin(2 * (x0 + step)) ** 2
              - math.exp(math.sin(2 * (x0 - step))) - math.sin(2 * (x0 - step)) ** 2) / (2 * step)
        assert abs(d.value(0.1) - fd) < 1e-8


def test_second_derivative_of_delta_at_zero():
    d2 = derivative(DELTA, 0.0, order=2)
    est = classify_order(d2)
    assert abs(est.slope + 3) < 1e-6


def test_incremental_ratio_of_square():
    x, h = G.const(0.4), G.drho(1)
    r = incremental_ratio(SQ, x, h)
    assert all(abs(r.value(e) - (0.8 + e)) < 1e-14 for e in G.grid)


def test_incremental_ratio_is_unique_across_representatives():
    x, h = G.const(0.4), G.drho(2)
    r1 = incremental_ratio(SQ, x, h)
    r2 = incremental_ratio(SQ, x + GenNum(G, lambda e: e ** 30), h)
    assert negligible(r1 - r2)


def test_incremental_ratio_of_delta():
    h = B.reciprocal()
    r = incremental_ratio(DELTA, 0.0, h)
    for e in G.grid:
        lhs = h.value(e) * r.value(e)
        assert abs(lhs - (-1 / e)) <= 1e-9 / e


def test_incremental_ratio_matches_difference():
    f = gsf_from_function(lambda x: J_.sin(x) * x, name="f")
    x, h = G.const(0.2), G.drho(1)
    r = incremental_ratio(f, x, h)
    for e in G.grid[::5]:
        rhs = f.net(e, 0.2 + e) - f.net(e, 0.2)
        assert abs(e * r.value(e) - rhs) < 1e-15


def test_improper_integral_of_reciprocal():
    f = gsf_from_function(lambda s: 1 / s, name="1/s")
    I = integral(f, 1.0, G.drho(-1))
    for e in G.grid:
        exact = -math.log(e)
        assert abs(I.value(e) - exact) <= max(I.error(e), 1e-12 * exact)


def test_integral_of_delta_is_one():
    assert negligible(integral(DELTA, -1.0, 1.0) - 1)
    assert negligible(integral(DELTA, -1.0, 1.0, use_primitive=False) - 1)


def test_integral_of_sin_derivative_up_to_one_plus_drho():
    f = gsf_from_function(J_.sin, name="sin")
    upper = G.const(1.0) + G.drho(1)
    I = integral(derivative_gsf(f), 0.0, upper, use_primitive=False)
    for e in G.grid:
        assert abs(I.value(e) - math.sin(1 + e)) < 1e-13


def test_integral_against_scipy_quad():
    f = gsf_from_function(lambda x: J_.exp(-x * x) * J_.cos(3 * x), name="g")
    I = integral(f, -1.0, 2.0)
    ref, _ = sint.quad(lambda x: math.exp(-x * x) * math.cos(3 * x), -1.0, 2.0, epsabs=1e-15, epsrel=1e-13)
    assert abs(I.value(0.1) - ref) < 1e-13


def test_endpoint_order_violation():
    with pytest.raises(EndpointOrderViolation):
        integral(SQ, 1.0, 0.0)


def test_ivt_identity_at_zero():
    ident = gsf_from_function(lambda x: x, name="id")
    c = ivt_solve(ident, -1.0, 1.0, 0.0)
    assert all(abs(c.value(e)) <= e ** 12 for e in G.grid)


def test_ivt_cube_with_high_precision():
    c, res = ivt_solve(CUBE, 0.0, 1.0, G.drho(1), q_target=12, dps=lambda e: int(18 * abs(math.log10(e))) + 20, return_residual=True)
    assert all(abs(float(res.value(e))) <= e ** 12 for e in G.grid)
    for e in G.grid:
        assert math.isclose(float(c.value(e)), e ** (1 / 3), rel_tol=1e-12)


def test_ivt_delta_half_height():
    y = B * 0.5
    dps = lambda e: int(8 * abs(math.log10(e))) + 20
    c, res = ivt_solve(DELTA, 0.0, B.reciprocal(), y, q_target=6, dps=dps, return_residual=True)
    assert all(abs(float(res.value(e))) <= e ** 6 for e in G.grid)
    assert all(0 <= float(c.value(e)) <= e for e in G.grid)


def test_ivt_bracket_violation():
    with pytest.raises(BracketViolation):
        ivt_solve(SQ, 0.0, 1.0, 2.0)


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
def test_ivt_drho_power_family(p):
    ident = gsf_from_function(lambda x: x, name="id")
    y = GenNum(G, lambda e: e ** p)
    c = ivt_solve(ident, 0.0, 1.0, y, q_target=8)
    assert all(abs(c.value(e) - e ** p) <= e ** 8 + 1e-16 for e in G.grid)


def test_extreme_values_of_square():
    K = FunctCompact.of(Box(GenNum(G, lambda e: -1.0 - e), 1.0), G)
    m, M = extreme_values(SQ, K)
    assert all(abs(m.value(e)) < 1e-7 for e in G.grid)
    assert all(M.value(e) == -1.0 - e for e in G.grid)


def test_extreme_values_of_delta():
    K = FunctCompact.of(Box(-1.0, 1.0), G)
    m, M = extreme_values(DELTA, K)
    assert all(abs(M.value(e)) < 1e-12 for e in G.grid)
    assert all(DELTA.net(e, m.value(e)) < 0 for e in G.grid)


def test_extreme_values_of_constant():
    K = FunctCompact.of(Box(-1.0, 1.0), G)
    c = gsf_from_function(lambda x: 0 * x + 2.0, name="two")
    m, M = extreme_values(c, K)
    assert all(c.net(e, m.value(e)) == 2.0 == c.net(e, M.value(e)) for e in G.grid)


def test_taylor_remainder_of_exp():
    f = gsf_from_function(J_.exp, name="exp")
    R, verdict, est = taylor_remainder(f, 0.3, G.drho(1), 2)
    assert verdict == "Infinitesimal"
    assert abs(est.slope - 3) < 0.05
    for e in G.grid[:6]:
        exact = math.exp(0.3 + e) - math.exp(0.3) * (1 + e + e * e / 2)
        assert abs(R.value(e) - exact) < 1e-13


def test_taylor_remainder_of_polynomial_vanishes():
    f = gsf_from_function(lambda x: 1 + 2 * x - x ** 3, name="p")
    R, verdict, _ = taylor_remainder(f, 0.5, G.drho(1), 3)
    assert verdict == "Infinitesimal"
    assert all(R.value(e) == 0.0 for e in G.grid)


def test_taylor_remainder_of_delta_small_step():
    # the second derivative of delta grows like drho^-3, so a step drho^3 wins
    R, verdict, est = taylor_remainder(DELTA, 0.0, G.drho(3), 1)
    assert verdict == "Infinitesimal"
    assert est.classification is Classification.NEGLIGIBLE or est.slope > 0


def test_taylor_polynomial_plus_remainder():
    f = gsf_from_function(J_.sin, name="sin")
    k = G.drho(1) * 0.5
    P = taylor_polynomial(f, 0.2, k, 3)
    R, _, _ = taylor_remainder(f, 0.2, k, 3)
    for e in G.grid[::4]:
        assert abs(P.value(e) + R.value(e) - math.sin(0.2 + 0.5 * e)) < 1e-15


# -- properties ----------------------------------------------------------------

coef = st.floats(min_value=-2, max_value=2)
place = st.floats(min_value=-1, max_value=1)


def smooth(a, w, c):
    return gsf_from_function(lambda x: a * J_.sin(w * x) + c * x ** 3, name="s")


@given(coef, coef, coef, place, place)
def test_fundamental_theorem(a, w, c, lo, hi):
    lo, hi = sorted((lo, hi))
    f = smooth(a, w, c)
    F = antiderivative(f, lo)
    mid = 0.5 * (lo + hi)
    assert abs(derivative(F, mid).value(0.1) - f.net(0.1, mid)) < 1e-10
    I = integral(derivative_gsf(f), lo, hi, use_primitive=False)
    assert abs(I.value(0.1) - (f.net(0.1, hi) - f.net(0.1, lo))) < 1e-10


@given(coef, coef, place, place)
def test_integration_by_parts(a, w, lo, hi):
    lo, hi = sorted((lo, hi))
    fg = gsf_from_function(lambda x: (J_.sin(w * x) + a) * J_.exp(0.5 * x), name="fg")
    dfg = gsf_from_function(lambda x: w * J_.cos(w * x) * J_.exp(0.5 * x), name="f'g")
    fdg = gsf_from_function(lambda x: (J_.sin(w * x) + a) * 0.5 * J_.exp(0.5 * x), name="fg'")
    lhs = integral(fdg, lo, hi)
    rhs = fg(hi) - fg(lo) - integral(dfg, lo, hi)
    assert abs(lhs.value(0.1) - rhs.value(0.1)) < 1e-12


@given(st.floats(min_value=0.2, max_value=2), st.floats(min_value=-1, max_value=1))
def test_one_dimensional_change_of_variables(s, t):
    # int_0^1 f(phi(x)) phi'(x) dx = int_phi(0)^phi(1) f
    f = gsf_from_function(lambda y: J_.cos(y) + y * y, name="f")
    phi_lo, phi_hi = t, t + s
    pulled = gsf_from_function(lambda x: (J_.cos(t + s * x) + (t + s * x) ** 2) * s, name="pull")
    lhs = integral(pulled, 0.0, 1.0)
    rhs = integral(f, phi_lo, phi_hi)
    assert abs(lhs.value(0.1) - rhs.value(0.1)) < 1e-12


@given(coef, coef, coef, place, st.floats(min_value=0.1, max_value=1))
def test_mean_value_point(a, w, c, lo, width):
    f = smooth(a, w, c)
    hi = lo + width
    m = mvt_point(f, lo, hi)
    e = 0.1
    x = m.value(e)
    assert lo <= x <= hi
    slope = (f.net(e, hi) - f.net(e, lo)) / width
    d = f.net.derivatives(e, x, 1)[1]
    assert abs(d - slope) <= 1e-8 * (1 + abs(slope)) or _flat(f, e, lo, hi, slope)


def _flat(f, e, lo, hi, slope):
    xs = np.linspace(lo, hi, 2001)
    return min(abs(f.net.derivatives(e, float(x), 1)[1] - slope) for x in xs) < 1e-6


@given(coef, coef, place)
def test_primitives_are_unique_up_to_constant(a, w, x0):
    f = gsf_from_function(lambda x: a * J_.cos(w * x), name="f")
    F1 = antiderivative(f, 0.0)
    F2 = antiderivative(f, 0.5)
    d = F1(x0) - F2(x0) - (F1(0.9) - F2(0.9))
    assert all(abs(d.value(e)) < 1e-12 for e in G.grid[::11])
