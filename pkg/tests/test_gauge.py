import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gsf.ext import ExtReal
from gsf.gauge import (
    STANDARD as G,
    Classification,
    Gauge,
    GenNum,
    Trilean,
    classify_order,
    cofinal,
    gmin,
    interleave,
    is_negligible,
    is_strictly_positive,
    le,
    lt,
    net_from_samples,
)

from oracles import loglog_slope


def net(fn, name=""):
    return GenNum(G, fn, name=name)


def test_grid_defaults():
    assert G.grid[0] == 2.0 ** -4 and G.grid[-1] == 2.0 ** -48
    assert len(G.grid) == 45
    assert len(G.tail) == 23 and len(G.quarter) == 11


def test_grid_too_small_rejected():
    with pytest.raises(ValueError):
        Gauge(k_min=4, k_max=10)


def test_drho_slope_one():
    est = classify_order(G.drho(1))
    assert est.classification is Classification.MODERATE
    assert abs(est.slope - 1) < 1e-12


def test_inverse_cube_matches_log_ratio():
    x = net(lambda e: e ** -3)
    est = classify_order(x)
    ref = loglog_slope([e ** -3 for e in G.tail], G.tail)
    assert est.classification is Classification.MODERATE
    assert abs(est.slope - ref) < 1e-9
    assert abs(est.slope + 3) < 1e-9
    assert est.is_infinite


def test_exp_minus_inverse_is_negligible():
    est = classify_order(net(lambda e: math.exp(-1 / e)))
    assert est.classification is Classification.NEGLIGIBLE
    assert est.is_infinitesimal


def test_exp_inverse_is_not_moderate():
    est = classify_order(net(lambda e: ExtReal.exp_of(1 / e)))
    assert est.classification is Classification.NOT_MODERATE


def test_unit_is_neither_infinite_nor_infinitesimal():
    est = classify_order(G.const(1.0) + net(lambda e: 1e-300))
    assert est.classification is Classification.MODERATE
    assert not est.is_infinite and not est.is_infinitesimal


def test_oscillating_exponent_is_undetermined():
    x = net(lambda e: e if round(math.log2(e)) % 2 else e ** 6)
    assert classify_order(x).classification is Classification.UNDETERMINED


def test_log_corrected_fit():
    x = net(lambda e: e ** 2 * math.log(1 / e))
    est = classify_order(x, log_corrected=True)
    assert abs(est.slope - 2) < 1e-6
    assert abs(est.log_power - 1) < 1e-6


def test_abs_of_negative_drho_is_sample_exact():
    x = abs(-G.drho(1))
    assert all(x.value(e) == e for e in G.grid)


def test_min_of_powers():
    m = gmin(G.drho(1), G.drho(2))
    assert all(m.value(e) == e ** 2 for e in G.tail)


def test_product_exponents_add():
    est = classify_order(G.drho(-2) * G.drho(3))
    assert abs(est.slope - 1) < 1e-9


def test_le_examples():
    assert le(G.drho(2), G.drho(1)) is Trilean.TRUE
    assert le(1, G.drho(1)) is Trilean.FALSE
    x = G.const(0.3)
    y = x + net(lambda e: math.exp(-1 / e) * math.sin(1 / e))
    assert le(x, y) is Trilean.TRUE
    assert lt(G.drho(2), G.drho(1)) is Trilean.TRUE


def test_strict_positivity_examples():
    assert is_strictly_positive(G.drho(5)) is Trilean.TRUE
    assert is_strictly_positive(G.const(0.0)) is Trilean.FALSE
    osc = net(lambda e: e * math.sin(1 / e))
    assert is_strictly_positive(osc) in (Trilean.FALSE, Trilean.UNDETERMINED)


def test_interleave_examples():
    even = lambda k: k % 2 == 0
    x = G.drho(1)
    same = interleave(x, x, even)
    assert all(same.value(e) == x.value(e) for e in G.grid)
    z = interleave(G.const(1.0), G.const(0.0), even)
    assert le(z, 0.5) is Trilean.UNDETERMINED
    assert le(0.5, z) is Trilean.UNDETERMINED
    p = interleave(G.drho(1), G.drho(2), even) * interleave(G.drho(2), G.drho(1), even)
    assert all(p.value(e) == e ** 3 for e in G.grid)


def test_cofinal_rule():
    assert cofinal([False] * 7 + [True] * 4)
    assert not cofinal([True] * 4 + [False] * 7)
    assert not cofinal([False] * 11)


def test_samples_round_trip():
    x = net_from_samples(G, [float(k) for k in G.indices])
    assert x.value(G.eps_at(10)) == 10.0


def test_concurrent_evaluation_is_consistent():
    from concurrent.futures import ThreadPoolExecutor

    calls = []
    x = net(lambda e: calls.append(e) or e ** 2)
    with ThreadPoolExecutor(8) as pool:
        vals = list(pool.map(x.value, G.grid * 4))
    assert vals == [e ** 2 for e in G.grid] * 4


# -- properties ----------------------------------------------------------------

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=9)
powers = st.integers(min_value=-3, max_value=3)


def exact_net(c, a):
    return GenNum(G, lambda e: c * Fraction(e) ** a)


@given(fractions, powers, fractions, powers, fractions, powers)
def test_ring_axioms_sample_exact(c1, a1, c2, a2, c3, a3):
    x, y, z = exact_net(c1, a1), exact_net(c2, a2), exact_net(c3, a3)
    for e in G.grid[::3]:
        assert ((x + y) + z).value(e) == (x + (y + z)).value(e)
        assert ((x * y) * z).value(e) == (x * (y * z)).value(e)
        assert (x * (y + z)).value(e) == (x * y + x * z).value(e)
        assert abs(x * y).value(e) == (abs(x) * abs(y)).value(e)
        assert abs(abs(x).value(e) - abs(y).value(e)) <= abs(x - y).value(e)


@given(st.integers(min_value=-5, max_value=5))
def test_drho_power_slope(q):
    est = classify_order(G.drho(q))
    if q == 0:
        assert abs(est.slope) < 1e-6
    else:
        assert abs(est.slope - q) < 1e-6


@given(st.floats(min_value=-3, max_value=3), st.integers(min_value=-3, max_value=3), st.floats(min_value=0.5, max_value=3))
def test_adding_negligible_keeps_classification(c, a, s):
    if abs(c) < 1e-3:
        c = 1.0
    x = net(lambda e: c * e ** a)
    n = net(lambda e: s * math.exp(-1 / e))
    assert is_negligible(n)
    assert classify_order(x + n).classification is classify_order(x).classification


@given(st.floats(min_value=0.1, max_value=5), st.integers(min_value=-4, max_value=6))
def test_strictly_positive_is_invertible(c, a):
    x = net(lambda e: c * e ** a)
    if is_strictly_positive(x) is Trilean.TRUE:
        assert le(0, x) is Trilean.TRUE
        assert classify_order(x.reciprocal()).classification is Classification.MODERATE


@given(st.floats(min_value=-2, max_value=2), st.integers(min_value=-2, max_value=2))
def test_le_reflexive(c, a):
    x = net(lambda e: c * e ** a)
    assert le(x, x) is Trilean.TRUE


@given(st.lists(st.tuples(st.floats(min_value=-2, max_value=2), st.integers(min_value=-2, max_value=2)), min_size=3, max_size=3))
def test_le_transitive(triple):
    x, y, z = (net(lambda e, c=c, a=a: c * e ** a) for c, a in triple)
    if le(x, y) is Trilean.TRUE and le(y, z) is Trilean.TRUE:
        assert le(x, z) is Trilean.TRUE
