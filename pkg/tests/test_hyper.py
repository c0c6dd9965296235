import math

import pytest
from hypothesis import given, strategies as st

from gsf import jet as J_
from gsf.gauge import STANDARD as G, Gauge, GenNum
from gsf.hyper import (
    HyperSeq,
    NotExtendable,
    NotHypernatural,
    extend_sequence,
    hyperlimit,
    ni,
    threshold_log,
)

from oracles import hyper_threshold_power


def sigma_two():
    """The gauge ``exp(-eps**(-1/eps))``, far smaller than every power of eps."""
    loglog = lambda e: (1 / e) * math.log(1 / e)
    return Gauge(
        rho=lambda e: 0.0,
        log_rho_fn=lambda e: -math.exp(loglog(e)) if loglog(e) < 700 else -math.inf,
        loglog_inv_fn=loglog,
        name="sigma2",
    )


def test_ni_of_five_plus_negligible():
    n = ni(G.const(5.0) + GenNum(G, lambda e: math.exp(-1 / e)))
    assert all(n.value(e) == 5 for e in G.grid)


def test_ni_of_five_plus_drho_squared():
    # the offset is absorbed by 5 in double precision on the grid tail
    n = ni(G.const(5.0) + G.drho(2))
    assert all(n.value(e) == 5 for e in G.grid)


def test_ni_of_integer_part_plus_cube():
    x = GenNum(G, lambda e: float(int(e ** -0.5)) + e ** 3)
    n = ni(x)
    assert all(n.value(e) == int(e ** -0.5) for e in G.grid)


def test_ni_rejects_non_negligible_gap():
    with pytest.raises(NotHypernatural):
        ni(G.drho(2))
    with pytest.raises(NotHypernatural):
        ni(G.const(5.3))


def test_ni_of_one_minus_negligible():
    x = GenNum(G, lambda e: 1.0 - math.exp(math.log(e) / e))
    n = ni(x)
    assert all(n.value(e) == 1 for e in G.grid)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("q", [1, 2, 3])
def test_power_thresholds_match_oracle(k, q):
    seq = HyperSeq(G, G, lambda e, n, k=k: 1 / n ** k)
    for e in G.quarter[:4]:
        t = threshold_log(seq, e, 0.0, q, q / k * abs(math.log(e)) + 1.0)
        want = hyper_threshold_power(q, k, e)
        if want <= 1e9:
            assert round(math.exp(t)) == want
        else:
            assert abs(t - math.log(want)) < 1e-9


def test_reciprocal_square_confirmed():
    r = hyperlimit(HyperSeq(G, G, lambda e, n: 1 / n ** 2), 0.0, q_max=5)
    assert r.verdict == "Confirmed"


def test_reciprocal_log_two_gauges():
    good = hyperlimit(HyperSeq(sigma_two(), G, lambda e, n: 1 / J_.log(n)), 0.0, q_max=5)
    assert good.verdict == "Confirmed"
    bad = hyperlimit(HyperSeq(G, G, lambda e, n: 1 / J_.log(n)), 0.0, q_max=5)
    assert bad.verdict == "Refuted"
    entry = bad.per_q[bad.failed_q - 1]
    assert entry["status"] == "refuted" and entry["witness"]


def test_estimated_limit():
    r = hyperlimit(HyperSeq(G, G, lambda e, n: 2.0 + 1 / n), None, q_max=4)
    assert r.trust == "estimated" and r.verdict == "Confirmed"


def test_extend_sequence_ok():
    seq = extend_sequence(lambda n: GenNum(G, lambda e, n=n: 1 / n + 1 / e))
    assert seq.at(0.5, 4) == 2.25
    const = extend_sequence(lambda n: G.const(3.0))
    assert const.at(0.1, 10 ** 6) == 3.0


def test_extend_sequence_rejects_fast_growth():
    with pytest.raises(NotExtendable):
        extend_sequence(lambda n: GenNum(G, lambda e, n=n: e ** (-float(n)) if n * -math.log(e) < 700 else math.inf))


# -- properties ----------------------------------------------------------------


@given(st.floats(min_value=-3, max_value=3), st.integers(min_value=1, max_value=3))
def test_limit_is_unique(c, k):
    seq = HyperSeq(G, G, lambda e, n: c + 1 / n ** k)
    assert hyperlimit(seq, c, q_max=3).verdict == "Confirmed"
    assert hyperlimit(seq, c + 0.5, q_max=3).verdict == "Refuted"


@given(st.integers(min_value=0, max_value=1000), st.floats(min_value=0.1, max_value=3))
def test_ni_is_idempotent(m, s):
    n = ni(G.const(float(m)) + GenNum(G, lambda e: 0.4 * math.exp(-s / e)))
    again = ni(n.as_gennum())
    assert all(again.value(e) == n.value(e) == m for e in G.grid)


@given(st.floats(min_value=0.5, max_value=3), st.floats(min_value=-2, max_value=2))
def test_monotone_power_sequences_converge(p, c):
    seq = HyperSeq(G, G, lambda e, n: c - 1 / n ** p)
    r = hyperlimit(seq, c, q_max=6)
    assert r.verdict == "Confirmed"
