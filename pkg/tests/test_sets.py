import math

import pytest
from hypothesis import given, strategies as st

from gsf.gauge import STANDARD as G, GenNum, Trilean, interleave
from gsf.sets import (
    Ball,
    Box,
    ConvergentSequence,
    EmptyCover,
    Enlarged,
    FinitePoints,
    FiniteUnion,
    FunctCompact,
    GenericSet,
    UniformGrid,
    codistance_net,
    distance_net,
    enlarge,
    lebesgue_number,
    member_internal,
    member_strongly,
    strong_membership_order,
)

UNIT = Box(0.0, 1.0)
OPEN_UNIT = Box(0.0, 1.0, open=True)


def grid_set():
    """``{i * rho**(1/eps)}`` in ``[0, 1]``."""
    return UniformGrid(0.0, 1.0, lambda e: math.log(e) / e)


def test_internal_membership_examples():
    assert member_internal(G.const(1.0), UNIT) is Trilean.TRUE
    assert member_internal(G.const(2.0), UNIT) is Trilean.FALSE
    assert all(distance_net(G.const(2.0), UNIT).value(e) == 1.0 for e in G.grid)


def test_grid_set_contains_unit_interval_points():
    K = grid_set()
    x = G.const(1 / 3)
    assert member_internal(x, K) is Trilean.TRUE
    for e in G.grid:
        h = math.exp(math.log(e) / e) if math.log(e) / e > -745 else 0.0
        assert K.dist(e, 1 / 3) <= max(h, 4 * math.ulp(1 / 3))


def test_grid_set_enlargement_covers_unit_interval():
    # the radius rho**(1/eps) is negligible, so only the per-eps slice is checked
    K = grid_set()
    E = Enlarged(K, K.spacing)
    for e in G.grid:
        for x in (0.0, 1 / 3, 0.37, 1.0):
            assert E.dist(e, x) <= 4 * math.ulp(1.0)
        if K.spacing(e) > 0:
            assert K.measure_of_enlargement(e, K.spacing(e)) >= 1.0


def test_strong_membership_examples():
    assert member_strongly(G.const(0.5), OPEN_UNIT) is Trilean.TRUE
    x = G.drho(1)
    assert member_strongly(x, OPEN_UNIT) is Trilean.TRUE
    assert strong_membership_order(x, OPEN_UNIT) == 2
    assert member_strongly(G.const(0.0), OPEN_UNIT) is Trilean.FALSE


def test_enlargement_closed_forms():
    r = G.drho(3)
    E = enlarge(FunctCompact.of(UNIT, G), r)
    P = enlarge(FunctCompact.of(FinitePoints([0.0]), G), r)
    for e in G.grid:
        assert E.base_measure(e) == 1 + 2 * e ** 3
        assert P.base_measure(e) == 2 * e ** 3
        assert P.base.intervals(e) == [(-e ** 3, e ** 3)]


def test_enlarge_needs_positive_radius():
    with pytest.raises(ValueError):
        enlarge(FunctCompact.of(UNIT, G), G.const(0.0))


def test_lebesgue_number_overlap():
    K = FunctCompact.of(Box(-1.0, 1.0), G)
    s, positive = lebesgue_number([Box(-2.0, 0.1, open=True), Box(-0.1, 2.0, open=True)], K)
    assert positive is Trilean.TRUE
    assert all(abs(s.value(e) - 0.05) < 1e-15 for e in G.grid)


def test_lebesgue_number_vanishing_overlap():
    K = FunctCompact.of(Box(-1.0, 1.0), G)
    r = lambda e: 1 + math.exp(-1 / e)
    s, positive = lebesgue_number([Ball(-1.0, r), Ball(1.0, r)], K)
    assert positive is not Trilean.TRUE
    assert all(s.value(e) <= math.exp(-1 / e) + 1e-16 for e in G.grid)


def test_lebesgue_number_empty_slice_and_empty_cover():
    K = FunctCompact.of(Box(1.0, 0.0), G)
    s, _ = lebesgue_number([Box(-2.0, 2.0, open=True)], K)
    assert all(s.value(e) == 1.0 for e in G.grid)
    with pytest.raises(EmptyCover):
        lebesgue_number([], K)


def test_structured_distances():
    B = Ball(0.0, 1.0)
    assert B.dist(0.1, 3.0) == 2.0 and B.codist(0.1, 0.25) == 0.75
    U = FiniteUnion([Box(0.0, 1.0), Box(2.0, 3.0)])
    assert U.dist(0.1, 1.5) == 0.5
    P = FinitePoints([0.0, 1.0])
    assert P.dist(0.1, 0.75) == 0.25
    S = ConvergentSequence.reciprocal()
    assert abs(S.dist(0.1, 0.3) - (1 / 3 - 0.3)) < 1e-15


def test_generic_set_grid_distance():
    disc = GenericSet(lambda e, x: (x[0] ** 2 + x[1] ** 2) <= 1, [-2.0, -2.0], [2.0, 2.0], points=201)
    d = disc.dist(0.1, [1.5, 0.0])
    assert abs(d - 0.5) < 0.03


# -- properties ----------------------------------------------------------------

points = st.floats(min_value=-2.0, max_value=3.0, allow_nan=False)
power = st.integers(min_value=1, max_value=6)


@given(points, power)
def test_dist_codist_exclusive(c, q):
    x = GenNum(G, lambda e: c + e ** q)
    for A in (OPEN_UNIT, Ball(0.5, 0.7), FiniteUnion([Box(0.0, 1.0, open=True), Box(1.5, 2.0, open=True)])):
        for e in G.grid[::5]:
            d, cd = A.dist(e, x.value(e)), A.codist(e, x.value(e))
            assert d >= 0 and cd >= 0
            assert not (d > 0 and cd > 0)


@given(points, power)
def test_strong_implies_internal(c, q):
    x = GenNum(G, lambda e: c + e ** q)
    for A in (OPEN_UNIT, Ball(0.5, 0.7)):
        if member_strongly(x, A) is Trilean.TRUE:
            assert member_internal(x, A) is Trilean.TRUE


@given(points, st.integers(min_value=2, max_value=5))
def test_internal_stable_under_negligible_perturbation(c, m):
    x = G.const(c)
    y = interleave(x + GenNum(G, lambda e: math.exp(-1 / e)), x, lambda k: k % m == 0)
    for A in (UNIT, Ball(0.5, 0.7, open=False)):
        assert member_internal(x, A) is member_internal(y, A)


@given(st.floats(min_value=0.05, max_value=0.95), st.integers(min_value=-1, max_value=1))
def test_strongly_internal_sets_are_sharply_open(c, sign):
    x = G.const(c) + GenNum(G, lambda e: 0.04 * e)
    q = strong_membership_order(x, OPEN_UNIT)
    assert q is not None
    y = x + GenNum(G, lambda e: sign * e ** (q + 1))
    assert member_strongly(y, OPEN_UNIT) is Trilean.TRUE


@given(st.floats(min_value=1e-6, max_value=0.5), st.floats(min_value=-1, max_value=1), st.floats(min_value=0.1, max_value=2))
def test_enlargement_measure_matches_closed_form(r, lo, width):
    B = Box(lo, lo + width)
    E = enlarge(FunctCompact.of(B, G), G.const(r))
    for e in G.grid[::7]:
        assert math.isclose(E.base_measure(e), width + 2 * r, rel_tol=1e-14)
        assert math.isclose(E.measure_of_enlargement(e, r), width + 4 * r, rel_tol=1e-14)
    pts = FinitePoints([lo, lo + width])
    for e in G.grid[::7]:
        exact = 4 * r if width > 2 * r else width + 2 * r
        assert math.isclose(pts.measure_of_enlargement(e, r), exact, rel_tol=1e-14)


def test_codistance_is_exact_for_boxes():
    x = G.drho(2)
    c = codistance_net(x, OPEN_UNIT)
    assert all(c.value(e) == e ** 2 for e in G.grid)
