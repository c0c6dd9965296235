import math

import pytest
from hypothesis import given, strategies as st

from gsf import jet as J_
from gsf.functions import (
    GSF,
    CodomainMismatch,
    CompactC0,
    Delta,
    DerivativeOf,
    DomainViolation,
    Heaviside,
    SmoothFn,
    SmoothNet,
    audit_moderateness,
    compose,
    default_b,
    embed,
    gsf_from_function,
    identity,
)
from gsf.gauge import STANDARD as G, Classification, GenNum, classify_order, interleave
from gsf.mollifier import default_mollifier
from gsf.sets import Box

from oracles import heaviside_ref, smooth_embedding_ref

MU = default_mollifier()
B = default_b(G)
DELTA = embed(Delta())
H = embed(Heaviside())


def negligible(x):
    return classify_order(x).classification is Classification.NEGLIGIBLE


def test_delta_at_zero_is_b():
    v = DELTA(0.0)
    assert all(v.value(e) == 1 / e for e in G.grid)


def test_square_at_drho():
    sq = gsf_from_function(lambda x: x * x, name="sq")
    v = sq(G.drho(1))
    assert all(v.value(e) == e * e for e in G.grid)


def test_delta_far_from_zero_is_negligible():
    assert negligible(DELTA(1.0))


def test_delta_integer_zeros():
    for k in (1, 2, 3):
        v = DELTA(B.reciprocal() * k)
        assert all(abs(v.value(e)) <= 1e-10 / e for e in G.grid)


def test_heaviside_at_zero_is_half():
    est = classify_order(H(0.0) - 0.5)
    assert est.classification is Classification.NEGLIGIBLE or est.slope >= 5


def test_heaviside_matches_quadrature_oracle():
    for e in (2.0 ** -5, 2.0 ** -7, 2.0 ** -9):
        for u in (-1.5, -0.3, 0.25, 0.9, 2.5):
            x = u * e
            assert abs(float(H.net(e, x)) - heaviside_ref(MU, e, x)) < 1e-9


def test_sin_embedding_matches_quadrature_oracle():
    f = embed(SmoothFn(J_.sin, "sin"))
    for e in (2.0 ** -5, 2.0 ** -8):
        for x in (0.3, -1.1):
            assert abs(float(f.net(e, x)) - smooth_embedding_ref(math.sin, MU, e, x)) < 1e-10


def test_sin_embedding_close_to_sin():
    f = embed(SmoothFn(J_.sin, "sin"))
    diff = f(0.3) - GenNum(G, lambda e: math.sin(0.3))
    assert negligible(diff)


def test_compose_identity():
    f = gsf_from_function(lambda x: J_.exp(x) * J_.sin(3 * x), name="f")
    g = compose(identity(), f)
    for x in (-0.7, 0.1, 1.3):
        for e in G.grid[::9]:
            assert g.net(e, x) == f.net(e, x)


def test_delta_compose_delta():
    dd = compose(DELTA, DELTA)
    assert negligible(dd(0.0))
    assert negligible(dd(1.0) - B)


def test_codomain_mismatch():
    f2 = GSF(SmoothNet(lambda e, x: x[0] * x[1], n_in=2), gauge=G)
    g = GSF(SmoothNet(lambda e, x: (x, x), n_out=2), gauge=G)
    with pytest.raises(CodomainMismatch):
        compose(g, g)
    compose(f2, g)


def test_domain_violation():
    f = gsf_from_function(J_.log, domain=Box(0.0, 10.0, open=True), name="log")
    with pytest.raises(DomainViolation):
        f(-1.0)
    f(1.0)


def test_audit_delta_slopes():
    rep = audit_moderateness(DELTA, 0.0, max_order=2)
    assert rep.verdict
    slopes = {e.alpha[0]: e.estimate.slope for e in rep.entries if e.alpha[0] % 2 == 0}
    assert abs(slopes[0] + 1) < 1e-6 and abs(slopes[2] + 3) < 1e-6
    # odd derivatives of an even kernel vanish at 0
    odd = [e for e in rep.entries if e.alpha[0] == 1][0]
    assert odd.estimate.classification is Classification.NEGLIGIBLE


def test_audit_delta_slopes_off_center():
    x = B.reciprocal() * 0.5
    rep = audit_moderateness(DELTA, x, max_order=2)
    slopes = [e.estimate.slope for e in rep.entries]
    assert [round(s, 6) for s in slopes] == [-1.0, -2.0, -3.0]


def test_audit_polynomial_slopes_nonnegative():
    sq = gsf_from_function(lambda x: x * x, name="sq")
    rep = audit_moderateness(sq, 0.7, max_order=3)
    assert rep.verdict
    for e in rep.entries:
        assert e.estimate.classification is Classification.NEGLIGIBLE or e.estimate.slope >= -1e-9


def test_audit_exponential_growth_not_moderate():
    f = GSF(SmoothNet(lambda e, x: J_.exp(x / e) if x / e < 700 else math.inf), gauge=G)
    rep = audit_moderateness(f, 1.0, max_order=1)
    assert not rep.verdict


def test_compact_c0_embedding():
    tent = CompactC0((-0.5, 0.0, 0.5), (0.0, 1.0, 0.0), (-0.5, 0.5))
    f = embed(tent)
    assert negligible(f(2.0))
    # linear pieces are reproduced exactly up to the float floor of the kernel mass
    v = f(0.25)
    assert all(abs(v.value(e) - 0.5) < 1e-12 for e in G.tail)
    # at the kink the smoothing error is of order eps
    assert all(abs(f.net(e, 0.5)) <= 10 * e for e in G.grid[-3:])
    with pytest.raises(ValueError):
        CompactC0((-0.5, 0.6), (0.0, 0.0), (-0.5, 0.5))


def test_derivative_of_spec():
    dH = embed(DerivativeOf(Heaviside()))
    for e in G.grid[::6]:
        assert math.isclose(dH.net(e, 0.0), DELTA.net(e, 0.0), rel_tol=1e-12)


def test_two_variable_partials_match_finite_differences():
    f = GSF(SmoothNet(lambda e, x: J_.sin(x[0]) * J_.exp(2 * x[1]), n_in=2), gauge=G)
    x0 = (0.3, -0.2)
    h = 1e-5
    d10 = f.net.partial(0.1, x0, (1, 0))
    d01 = f.net.partial(0.1, x0, (0, 1))
    fd10 = (f.net(0.1, (x0[0] + h, x0[1])) - f.net(0.1, (x0[0] - h, x0[1]))) / (2 * h)
    fd01 = (f.net(0.1, (x0[0], x0[1] + h)) - f.net(0.1, (x0[0], x0[1] - h))) / (2 * h)
    assert abs(d10 - fd10) <= 1e-4 * abs(fd10)
    assert abs(d01 - fd01) <= 1e-4 * abs(fd01)


# -- properties ----------------------------------------------------------------

coef = st.floats(min_value=-2, max_value=2)


@given(st.floats(min_value=-2, max_value=2), st.integers(min_value=2, max_value=5), st.sampled_from(["sin", "exp", "delta"]))
def test_representative_independence(x0, m, kind):
    f = {"sin": gsf_from_function(J_.sin), "exp": gsf_from_function(J_.exp), "delta": DELTA}[kind]
    x = B.reciprocal() * x0 if kind == "delta" else G.const(x0)
    y = interleave(x + GenNum(G, lambda e: e ** 20), x, lambda k: k % m == 0)
    assert negligible(f(y) - f(x))


@given(st.floats(min_value=-1, max_value=1), st.integers(min_value=2, max_value=6), st.floats(min_value=-1, max_value=1))
def test_sharp_lipschitz(x0, q, s):
    f = gsf_from_function(lambda x: J_.sin(3 * x) + x ** 3, name="f")
    x = G.const(x0)
    y = x + GenNum(G, lambda e: s * e ** q)
    # |f'| <= 3 + 3 (x0 + 1)^2 on the neighbourhood
    L = 3 + 3 * (abs(x0) + 1) ** 2
    for e in G.grid:
        assert abs(f(y).value(e) - f(x).value(e)) <= L * abs(y.value(e) - x.value(e)) * (1 + 1e-12) + 1e-300


@given(st.floats(min_value=-1.5, max_value=1.5), st.floats(min_value=0.5, max_value=3))
def test_composition_audit_closure(x0, w):
    f = gsf_from_function(lambda x: J_.sin(w * x), name="f")
    g = DELTA
    x = B.reciprocal() * x0
    if audit_moderateness(f, x).verdict and audit_moderateness(g, f(x)).verdict:
        assert audit_moderateness(compose(g, f), x).verdict


@given(coef, coef, st.floats(min_value=-3, max_value=3))
def test_embedding_linearity(a, c, u):
    S = embed(a * Delta() + c * Heaviside())
    for e in G.grid[::8]:
        x = u * e
        lhs = S.net(e, x)
        rhs = a * DELTA.net(e, x) + c * H.net(e, x)
        assert abs(lhs - rhs) <= 1e-12 * (abs(a) / e + abs(c) + 1)
