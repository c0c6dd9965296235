"""Measures of functionally compact sets as limits of enlargement measures,
integrals over them, additivity and change of variables.

For each ``m`` the net ``a_m = [lambda(closed rho**m enlargement of K_eps)]``
is formed and the consecutive differences ``a_m - a_{m+1}`` are classified.
Differences are computed directly from shells (never as a difference of two
rounded totals), so their orders survive far below float resolution.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from .functions import GSF
from .gauge import (
    Classification,
    GenNum,
    OrderEstimate,
    Trilean,
    classify_order,
    is_strictly_positive,
)
from .jet import Jet, new_tag, real_part
from .sets import Box, FiniteUnion, FunctCompact, _merge

M_MAX = 12
CONVERGENCE_RATE = 0.5
RATE_SLACK = 0.05
STALL_SLOPE = 0.1
STALL_RUN = 3


class NotMeasurableDomain(ValueError):
    pass


class NotAlmostDisjoint(ValueError):
    pass


class SingularJacobian(ValueError):
    pass


@dataclass
class MeasureResult:
    """``status`` is ``Measurable``, ``NotMeasurable`` or ``Undetermined``."""

    status: str
    value: Optional[GenNum]
    m_star: Optional[int]
    trace: list = field(default_factory=list)
    evidence: str = ""
    a: list = field(default_factory=list)

    @property
    def measurable(self) -> bool:
        return self.status == "Measurable"

    def as_dict(self, with_samples: bool = True) -> dict:
        out = {"status": self.status, "m_star": self.m_star, "evidence": self.evidence, "trace": self.trace}
        if with_samples and self.a:
            g = self.a[0].gauge
            out["grid"] = [float(e) for e in g.grid]
            out["a_m"] = [[float(x.value(e)) for e in g.grid] for x in self.a]
        if self.value is not None:
            g = self.value.gauge
            out["value_samples"] = [float(self.value.value(e)) for e in g.grid]
        return out


def _stabilize(diffs: Sequence[GenNum], ms: Sequence[int]) -> tuple:
    """Apply the sharp-Cauchy rule to the difference nets ``d_m``.

    Returns ``(status, m_star, trace, evidence)``.
    """
    trace = []
    ok = []
    stall = 0
    stalled_at = None
    for m, d in zip(ms, diffs):
        est = classify_order(d)
        good = est.classification is Classification.NEGLIGIBLE or (
            est.classification is Classification.MODERATE
            and est.slope is not None
            and est.slope >= CONVERGENCE_RATE * m - RATE_SLACK
        )
        slow = est.classification is Classification.MODERATE and est.slope is not None and est.slope < STALL_SLOPE
        stall = stall + 1 if slow else 0
        if stall >= STALL_RUN and stalled_at is None:
            stalled_at = m
        ok.append(good)
        trace.append({"m": m, **est.as_dict(), "converging": good})
    if stalled_at is not None:
        return "NotMeasurable", None, trace, f"difference slopes below {STALL_SLOPE} for {STALL_RUN} consecutive m (up to m={stalled_at})"
    m_star = None
    for i in range(len(ok) - 1, -1, -1):
        if not ok[i]:
            break
        m_star = ms[i]
    if m_star is not None and len(ok) >= 2 and m_star <= ms[-2]:
        return "Measurable", m_star, trace, f"differences decay at rate >= {CONVERGENCE_RATE}*m from m={m_star}"
    return "Undetermined", None, trace, "no stabilization index within m_max"


def measure(K: FunctCompact, m_max: int = M_MAX) -> MeasureResult:
    """Lebesgue measure of ``K`` in the sense of the enlargement limit."""
    g = K.gauge
    base = K.base
    ms = list(range(1, m_max))
    a = [GenNum(g, (lambda m: lambda e: base.measure_of_enlargement(e, g.rho_pow(e, m)))(m), name=f"a{m}") for m in range(1, m_max + 1)]
    diffs = [
        GenNum(
            g,
            (lambda m: lambda e: base.enlargement_excess(e, g.rho_pow(e, m)) - base.enlargement_excess(e, g.rho_pow(e, m + 1)))(m),
            name=f"d{m}",
        )
        for m in ms
    ]
    try:
        status, m_star, trace, evidence = _stabilize(diffs, ms)
    except NotImplementedError as exc:
        return MeasureResult("Undetermined", None, None, [], f"no enlargement measure: {exc}", a)
    value = None
    if status == "Measurable":
        try:
            base.base_measure(g.grid[0])
            value = GenNum(g, base.base_measure, name="measure")
        except NotImplementedError:
            value = a[-1]
    return MeasureResult(status, value, m_star, trace, evidence, a)


# ---------------------------------------------------------------------------
# integration over functionally compact sets
# ---------------------------------------------------------------------------


_ULP = float(np.finfo(float).eps)


def _quad1(fn, a, b, points=()):
    """Adaptive quadrature; the error bound adds a rounding term of a few
    ulps per panel on top of the Kronrod estimate."""
    if b <= a:
        return 0.0, 0.0
    pts = sorted({float(p) for p in points if a < p < b})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        v, r = integrate.quad(fn, a, b, points=pts or None, limit=400, epsabs=0.0, epsrel=1e-13)
    return v, r + 4 * _ULP * (len(pts) + 1) * abs(v)


def _quad_box(fn, lo, hi):
    if np.any(hi <= lo):
        return 0.0, 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.nquad(lambda *x: fn(x), list(zip(lo, hi)), opts={"epsabs": 0.0, "epsrel": 1e-11, "limit": 200})


def _interval_difference(A: list, B: list) -> list:
    """``union(A) minus interior of union(B)`` for merged interval lists."""
    out = []
    for a, b in A:
        pieces = [(a, b)]
        for c, d in B:
            nxt = []
            for p, q in pieces:
                if d <= p or c >= q:
                    nxt.append((p, q))
                    continue
                if p < c:
                    nxt.append((p, c))
                if d < q:
                    nxt.append((d, q))
            pieces = nxt
        out += pieces
    return out


def _box_shell(lo, hi, r_out, r_in) -> list:
    """Disjoint boxes whose union is ``box(r_out) minus box(r_in)``."""
    n = lo.size
    outer = [(lo[i] - r_out, hi[i] + r_out) for i in range(n)]
    inner = [(lo[i] - r_in, hi[i] + r_in) for i in range(n)]
    boxes = []
    for i in range(n):
        for side in (0, 1):
            b_lo, b_hi = [], []
            for j in range(n):
                if j < i:
                    b_lo.append(inner[j][0]), b_hi.append(inner[j][1])
                elif j == i:
                    if side == 0:
                        b_lo.append(outer[j][0]), b_hi.append(inner[j][0])
                    else:
                        b_lo.append(inner[j][1]), b_hi.append(outer[j][1])
                else:
                    b_lo.append(outer[j][0]), b_hi.append(outer[j][1])
            boxes.append((np.array(b_lo), np.array(b_hi)))
    return boxes


class _Region:
    """Per-eps integration over ``K_eps`` and over enlargement shells.

    1-D sets use their interval decomposition; boxes in higher dimension are
    enlarged as boxes (the rounded corners only change each ``a_m`` by
    ``O(rho**(n m))``, which does not affect the limit).
    """

    def __init__(self, K: FunctCompact, net):
        self.K = K
        self.net = net
        self.base = K.base
        self.dim = K.dim

    def _fn1(self, e):
        net = self.net
        return lambda s: float(net(e, s))

    def _fnn(self, e):
        net = self.net
        return lambda x: float(net(e, tuple(float(c) for c in x)))

    def _points(self, e):
        net = self.net
        return (net.breakpoints(e) + net.features(e)) if hasattr(net, "features") else []

    def _interval_sum(self, e, ivs):
        fn, pts = self._fn1(e), self._points(e)
        val = err = 0.0
        for a, b in ivs:
            v, r = _quad1(fn, a, b, pts)
            val += v
            err += r
        return val, err

    def over_base(self, e):
        if self.dim == 1:
            iv = self.base.intervals(e)
            if iv is None:
                raise NotImplementedError(f"no interval decomposition for {self.base.kind}")
            return self._interval_sum(e, _merge(iv))
        if isinstance(self.base, Box):
            lo, hi = self.base.bounds(e)
            return _quad_box(self._fnn(e), lo, hi)
        raise NotImplementedError("integration over this set kind is not available")

    def shell(self, e, r_out, r_in):
        """Integral over the enlargement(r_out) minus enlargement(r_in)."""
        if self.dim == 1:
            iv = self.base.intervals(e)
            if iv is None:
                raise NotImplementedError(f"no interval decomposition for {self.base.kind}")
            A = _merge([(a - r_out, b + r_out) for a, b in iv])
            B = _merge([(a - r_in, b + r_in) for a, b in iv])
            return self._interval_sum(e, _interval_difference(A, B))
        if isinstance(self.base, Box):
            lo, hi = self.base.bounds(e)
            val = err = 0.0
            for blo, bhi in _box_shell(lo, hi, r_out, r_in):
                v, r = _quad_box(self._fnn(e), blo, bhi)
                val += v
                err += r
            return val, err
        raise NotImplementedError("integration over this set kind is not available")

    def enlarged(self, e, r):
        v0, e0 = self.over_base(e)
        v1, e1 = self.shell(e, r, 0.0)
        return v0 + v1, e0 + e1


def _net_of(f):
    return f.net if isinstance(f, GSF) else f


def _cached_pair(g, fn, name):
    cache: dict = {}

    def get(e):
        if e not in cache:
            cache[e] = fn(e)
        return cache[e]

    return GenNum(g, lambda e: get(e)[0], err=lambda e: get(e)[1], name=name)


def integrate_fc(f, K: FunctCompact, m_max: int = M_MAX, check: bool = True, report: bool = False):
    """``int_K f`` as the limit over m of integrals over the enlargements.

    The returned net is the integral over ``K_eps`` itself; the trace shows
    the integrals over the enlargements stabilizing onto it. With
    ``report`` the pair ``(value, MeasureResult-style trace)`` is returned.
    """
    g = K.gauge
    if check:
        mres = measure(K, m_max)
        if not mres.measurable:
            raise NotMeasurableDomain(f"the domain is not measurable ({mres.status}: {mres.evidence})")
    region = _Region(K, _net_of(f))
    value = _cached_pair(g, region.over_base, "int_K")
    ms = list(range(1, m_max))
    diffs = [_cached_pair(g, (lambda m: lambda e: region.shell(e, g.rho_pow(e, m), g.rho_pow(e, m + 1)))(m), f"shell{m}") for m in ms]
    if not report:
        return value
    status, m_star, trace, evidence = _stabilize(diffs, ms)
    a = [_cached_pair(g, (lambda m: lambda e: region.enlarged(e, g.rho_pow(e, m)))(m), f"a{m}") for m in range(1, m_max + 1)]
    return value, MeasureResult(status, value if status == "Measurable" else None, m_star, trace, evidence, a)


def intersection_measure(K: FunctCompact, L: FunctCompact) -> GenNum:
    """``[lambda(K_eps intersect L_eps)]`` for 1-D interval sets and boxes."""
    g = K.gauge

    def rep(e):
        if K.dim == 1:
            A, B = K.base.intervals(e), L.base.intervals(e)
            if A is None or B is None:
                raise NotImplementedError("intersection measure needs interval slices")
            A, B = _merge(A), _merge(B)
            total = 0.0
            for a, b in A:
                for c, d in B:
                    total += max(0.0, min(b, d) - max(a, c))
            return total
        if isinstance(K.base, Box) and isinstance(L.base, Box):
            (l1, h1), (l2, h2) = K.base.bounds(e), L.base.bounds(e)
            return float(np.prod(np.maximum(np.minimum(h1, h2) - np.maximum(l1, l2), 0.0)))
        raise NotImplementedError("intersection measure needs interval slices or boxes")

    return GenNum(g, rep, name="lambda(K^L)")


@dataclass
class JoinReport:
    value: GenNum
    parts_sum: GenNum
    discrepancy: GenNum
    estimate: OrderEstimate

    def as_dict(self) -> dict:
        g = self.value.gauge
        return {
            "value_samples": [float(self.value.value(e)) for e in g.grid],
            "discrepancy": self.estimate.as_dict(),
        }


def join(K: FunctCompact, L: FunctCompact) -> FunctCompact:
    """``K v L = [K_eps union L_eps]``."""
    base = FiniteUnion([K.base, L.base])
    return FunctCompact(base, GenNum(K.gauge, lambda e: max(K.bound.value(e), L.bound.value(e)), name="bound"))


def join_integrate(K: FunctCompact, L: FunctCompact, f, m_max: int = M_MAX) -> JoinReport:
    """``int_{K v L} f`` together with a comparison against the sum of parts."""
    inter = intersection_measure(K, L)
    if classify_order(inter).classification is not Classification.NEGLIGIBLE:
        raise NotAlmostDisjoint("the intersection measure is not negligible")
    U = join(K, L)
    whole = integrate_fc(f, U, m_max)
    parts = integrate_fc(f, K, m_max) + integrate_fc(f, L, m_max)
    disc = _difference_within_error(whole, parts)
    return JoinReport(whole, parts, disc, classify_order(disc))


def _difference_within_error(x: GenNum, y: GenNum) -> GenNum:
    """``x - y`` carrying the quadrature error bounds plus a few ulps."""
    g = x.gauge

    def err(e):
        a, b = float(x.value(e)), float(y.value(e))
        return x.error(e) + y.error(e) + 8 * np.finfo(float).eps * (abs(a) + abs(b))

    return GenNum(g, lambda e: x.value(e) - y.value(e), err=err, name="discrepancy")


# ---------------------------------------------------------------------------
# change of variables
# ---------------------------------------------------------------------------


@dataclass
class ChangeOfVariablesReport:
    lhs: GenNum
    rhs: GenNum
    discrepancy: GenNum
    estimate: OrderEstimate

    def as_dict(self) -> dict:
        g = self.lhs.gauge
        return {
            "lhs_samples": [float(self.lhs.value(e)) for e in g.grid],
            "rhs_samples": [float(self.rhs.value(e)) for e in g.grid],
            "discrepancy": self.estimate.as_dict(),
        }


def _jacobian(net, e, x) -> np.ndarray:
    n = len(x)
    tags = [new_tag() for _ in range(n)]
    out = np.zeros((n, n))
    for j in range(n):
        args = tuple(Jet.variable(float(x[i]), 1, tags[j]) if i == j else float(x[i]) for i in range(n))
        y = net(e, args)
        ys = y if isinstance(y, (tuple, list, np.ndarray)) else [y]
        for i, yi in enumerate(ys):
            out[i, j] = float(real_part(yi.c[1])) if isinstance(yi, Jet) else 0.0
    return out


def _probe_points(K: FunctCompact, e) -> list:
    if K.dim == 1:
        pts = []
        for a, b in _merge(K.base.intervals(e)):
            pts += [a + t * (b - a) for t in (0.0, 0.25, 0.5, 0.75, 1.0)]
        return [np.array([p]) for p in pts]
    lo, hi = K.base.bounds(e)
    return [lo + np.array(t) * (hi - lo) for t in itertools.product((0.0, 0.5, 1.0), repeat=K.dim)]


def _check_jacobian(phi: GSF, K: FunctCompact):
    g = K.gauge
    n_probe = len(_probe_points(K, g.grid[0]))
    for i in range(n_probe):
        def det(e, i=i):
            x = _probe_points(K, e)[i]
            if K.dim == 1:
                return abs(phi.net.derivatives(e, float(x[0]), 1)[1])
            return abs(float(np.linalg.det(_jacobian(phi.net, e, x))))

        if is_strictly_positive(GenNum(g, det, name="|det dphi|")) is not Trilean.TRUE:
            raise SingularJacobian("the Jacobian determinant is not invertible at a probe")


def _polygon_integral(fn, verts: np.ndarray):
    """Integral over a convex polygon by fan triangulation and ``dblquad``
    in the target coordinates."""
    total = err = 0.0
    c = verts[0]
    for p, q in zip(verts[1:-1], verts[2:]):
        tri = np.array([c, p, q])
        tri = tri[np.argsort(tri[:, 0])]
        (x0, y0), (x1, y1), (x2, y2) = tri

        def line(xa, ya, xb, yb):
            if xb == xa:
                return lambda x: ya
            return lambda x: ya + (yb - ya) * (x - xa) / (xb - xa)

        long_ = line(x0, y0, x2, y2)
        for (xa, ya, xb, yb) in ((x0, y0, x1, y1), (x1, y1, x2, y2)):
            if xb <= xa:
                continue
            short = line(xa, ya, xb, yb)
            lo_f = lambda x, s=short: min(s(x), long_(x))
            hi_f = lambda x, s=short: max(s(x), long_(x))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                v, r = integrate.dblquad(lambda y, x: fn((x, y)), xa, xb, lo_f, hi_f, epsabs=0.0, epsrel=1e-11)
            total += v
            err += r
    return total, err


def change_of_variables(f: GSF, phi: GSF, K: FunctCompact) -> ChangeOfVariablesReport:
    """Both sides of ``int_{phi(K)} f = int_K (f o phi) |det d phi|``.

    In one dimension ``phi`` may be any monotone GSF on an interval ``K``.
    In two dimensions ``phi`` must be affine and ``K`` a box; the image is
    the parallelogram spanned by the box corners.
    """
    g = K.gauge
    _check_jacobian(phi, K)
    fnet, pnet = f.net, phi.net

    if K.dim == 1:
        def lhs(e):
            val = err = 0.0
            for a, b in _merge(K.base.intervals(e)):
                pa, pb = float(pnet(e, a)), float(pnet(e, b))
                v, r = _quad1(lambda s: float(fnet(e, s)), min(pa, pb), max(pa, pb), fnet.features(e))
                val, err = val + v, err + r
            return val, err

        def rhs(e):
            val = err = 0.0
            for a, b in _merge(K.base.intervals(e)):
                v, r = _quad1(lambda s: float(fnet(e, pnet(e, s))) * abs(pnet.derivatives(e, s, 1)[1]), a, b)
                val, err = val + v, err + r
            return val, err
    elif K.dim == 2 and isinstance(K.base, Box):
        def _affine(e):
            lo, hi = K.base.bounds(e)
            A = _jacobian(pnet, e, lo)
            if not np.allclose(A, _jacobian(pnet, e, hi), rtol=1e-12, atol=0.0):
                raise NotImplementedError("n-D change of variables is implemented for affine maps only")
            return lo, hi, A

        def lhs(e):
            lo, hi, _ = _affine(e)
            corners = [(lo[0], lo[1]), (hi[0], lo[1]), (hi[0], hi[1]), (lo[0], hi[1])]
            verts = np.array([np.asarray(pnet(e, c), dtype=float) for c in corners])
            return _polygon_integral(lambda y: float(fnet(e, y)), verts)

        def rhs(e):
            lo, hi, A = _affine(e)
            jac = abs(float(np.linalg.det(A)))
            return _quad_box(lambda x: float(fnet(e, tuple(float(c) for c in np.asarray(pnet(e, x), dtype=float)))) * jac, lo, hi)
    else:
        raise NotImplementedError("change of variables supports 1-D sets and 2-D boxes")

    L = _cached_pair(g, lhs, "lhs")
    R = _cached_pair(g, rhs, "rhs")
    disc = _difference_within_error(L, R)
    return ChangeOfVariablesReport(L, R, disc, classify_order(disc))
