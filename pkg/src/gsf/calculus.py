"""One-dimensional calculus on GSFs: derivatives, incremental ratios,
integrals with generalized endpoints, and the classical existence theorems
(intermediate values, extreme values, mean value, Taylor) evaluated per eps.
"""

from __future__ import annotations

import math
import warnings
from typing import Callable, Optional, Union

import mpmath
import numpy as np
from scipy import integrate, optimize

from . import jet as J_
from .functions import GSF, SmoothNet, _as_point, _jet_call, _shift
from .gauge import (
    GenNum,
    Trilean,
    classify_order,
    le,
    OrderEstimate,
)
from .jet import Jet
from .sets import FunctCompact, member_strongly

Number = Union[GenNum, float]


class QuadratureFailure(ArithmeticError):
    pass


class EndpointOrderViolation(ValueError):
    pass


class BracketViolation(ValueError):
    pass


class BoundaryPoint(ValueError):
    pass


SCAN_POINTS = 4097
BOUNDARY_Q = 8


def _quad(fn, a, b, points=(), epsrel=1e-13):
    if a == b:
        return 0.0, 0.0
    lo, hi = (a, b) if a < b else (b, a)
    pts = sorted({float(p) for p in points if lo < p < hi})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(fn, lo, hi, points=pts or None, limit=400, epsabs=0.0, epsrel=epsrel)
    # rounding allowance of a few ulps per panel
    err += 4 * np.finfo(float).eps * (len(pts) + 1) * abs(val)
    if a > b:
        val = -val
    if not math.isfinite(val):
        raise QuadratureFailure(f"quadrature over [{a}, {b}] returned {val}")
    return val, err


def _panels(a: float, b: float) -> list[tuple]:
    """Split [a, b] (a < b) into panels; geometric when the range spans many
    orders of magnitude on one side of zero."""
    def geometric(lo, hi):
        out = []
        x = lo
        while x < hi:
            nxt = min(hi, 2.0 * x)
            out.append((x, nxt))
            x = nxt
        return out

    if a > 0 and b / a > 16:
        return geometric(a, b)
    if b < 0 and a / b > 16:
        return [(-y, -x) for x, y in reversed(geometric(-b, -a))]
    if a < -1 and b > 1 and max(-a, b) > 16:
        out = [(-y, -x) for x, y in reversed(geometric(1.0, -a))] if -a > 1 else []
        out.append((-1.0, 1.0))
        out += geometric(1.0, b)
        return out
    return [(a, b)]


def _gen(v, gauge) -> GenNum:
    return _as_point(v, gauge)


def derivative_gsf(f: GSF, order: int = 1) -> GSF:
    """The GSF ``f^(order)`` of a 1-D GSF."""
    net = _shift(f.net, order)
    if order == 1:
        net.primitive = f.net
    return GSF(net, gauge=f.gauge, domain=f.domain, name=f"d{order}{f.name}")


def _directional(f: GSF, eps, x0, v, order: int):
    net = f.net
    if net.n_in == 1:
        d = net.derivatives(eps, x0, order)[order]
        return d * v ** order
    t = Jet.variable(0.0, order)
    x0 = np.atleast_1d(x0)
    v = np.atleast_1d(v)
    out = net(eps, tuple(float(a) + float(c) * t for a, c in zip(x0, v)))
    if not isinstance(out, Jet):
        return 0.0 if order else out
    return out.c[order] * math.factorial(order) if order <= out.order else 0.0


def derivative(f: GSF, x: Number, v: Number = 1.0, order: int = 1) -> GenNum:
    """``[d^order f_eps / d v_eps^order (x_eps)]``.

    At a boundary point of an open domain the derivative is taken at the
    interior probe ``x + s*drho**8`` (``s = +-1``, chosen inside).
    """
    g = f.gauge
    x = _gen(x, g)
    v = _gen(v, g)
    if f.domain is not None and getattr(f.domain, "open", False):
        if member_strongly(x, f.domain) is Trilean.FALSE:
            x = _interior_probe(f, x)
    return GenNum(g, lambda e: _directional(f, e, x.value(e), v.value(e), order), name=f"d{order}f")


def _interior_probe(f: GSF, x: GenNum) -> GenNum:
    g = x.gauge
    for s in (1.0, -1.0):
        probe = x + s * g.drho(BOUNDARY_Q)
        if member_strongly(probe, f.domain) is Trilean.TRUE:
            return probe
    raise BoundaryPoint("no interior probe at distance drho^8 lies in the domain")


def incremental_ratio(f: GSF, x: Number, h: Number, v: Number = 1.0) -> GenNum:
    """``r(x, h) = int_0^1 d f/d v (x + t h v) dt`` per eps, so that
    ``f(x + h v) = f(x) + h r(x, h)``."""
    g = f.gauge
    x, h, v = _gen(x, g), _gen(h, g), _gen(v, g)
    net = f.net
    errs: dict = {}

    def rep(e):
        x0, h0, v0 = x.value(e), h.value(e), v.value(e)
        if h0 == 0:
            errs[e] = 0.0
            return _directional(f, e, x0, v0, 1)
        if net.n_in == 1:
            step = h0 * v0
            pts = [(p - x0) / step for p in net.features(e) + net.breakpoints(e)]
            val, err = _quad(lambda t: _directional(f, e, x0 + t * step, v0, 1), 0.0, 1.0, pts)
        else:
            x0a, v0a = np.atleast_1d(x0), np.atleast_1d(v0)
            val, err = _quad(lambda t: _directional(f, e, x0a + t * h0 * v0a, v0a, 1), 0.0, 1.0)
        errs[e] = err
        return val

    def err(e):
        if e not in errs:
            rep(e)
        return errs[e]

    return GenNum(g, rep, err=err, name="ratio")


def _check_order(a: GenNum, b: GenNum):
    if le(a, b) is Trilean.FALSE:
        raise EndpointOrderViolation("lower endpoint exceeds the upper one")


def integral(f: GSF, a: Number, b: Number, use_primitive: bool = True, epsrel: float = 1e-13) -> GenNum:
    """``[int_{a_eps}^{b_eps} f_eps(s) ds]``.

    A registered exact primitive is used when available; otherwise adaptive
    Gauss-Kronrod quadrature on panels split at the net's breakpoints (and
    geometrically over very long ranges). The quadrature error estimate is
    carried as the sample error bound.
    """
    g = f.gauge
    a, b = _gen(a, g), _gen(b, g)
    _check_order(a, b)
    net = f.net
    prim = net.primitive if use_primitive else None
    if prim is not None:
        return GenNum(g, lambda e: _jet_call(prim, e, b.value(e)) - _jet_call(prim, e, a.value(e)), name="int")
    cache: dict = {}

    def compute(e):
        if e in cache:
            return cache[e]
        lo, hi = float(a.value(e)), float(b.value(e))
        sign = 1.0
        if lo > hi:
            lo, hi, sign = hi, lo, -1.0
        pts = net.breakpoints(e) + net.features(e)
        val = 0.0
        err = 0.0
        for p, q in _panels(lo, hi):
            v, r = _quad(lambda s: float(net(e, s)), p, q, pts, epsrel)
            val += v
            err += r
        cache[e] = (sign * val, err)
        return cache[e]

    return GenNum(g, lambda e: compute(e)[0], err=lambda e: compute(e)[1], name="int")


def antiderivative(f: GSF, a: Number) -> GSF:
    """The GSF ``x -> int_a^x f`` (quadrature value, exact higher derivatives)."""
    g = f.gauge
    a = _gen(a, g)
    net = f.net

    def value(e, x):
        lo = float(a.value(e))
        pts = net.breakpoints(e) + net.features(e)
        total = 0.0
        lo_, hi_, sgn = (lo, x, 1.0) if lo <= x else (x, lo, -1.0)
        for p, q in _panels(lo_, hi_):
            total += _quad(lambda s: float(net(e, s)), p, q, pts)[0]
        return sgn * total

    def taylor(e, x0, order):
        out = [value(e, float(x0))]
        if order >= 1:
            out += [c / (k + 1) for k, c in enumerate(net.taylor(e, x0, order - 1))]
        return out

    def fn(e, x):
        if isinstance(x, Jet):
            return J_.compose_series(taylor(e, x.c[0], x.order), x)
        return value(e, float(x))

    F = SmoothNet(fn, taylor_fn=taylor, features=net._features, breakpoints=net._breakpoints, name=f"int{f.name}")
    return GSF(F, gauge=g, domain=f.domain, name=F.name)


# ---------------------------------------------------------------------------
# intermediate values
# ---------------------------------------------------------------------------


def _scan_bracket(gfun, lo, hi, features):
    xs = list(np.linspace(lo, hi, SCAN_POINTS)) + [p for p in features if lo < p < hi]
    xs = sorted(set(float(x) for x in xs))
    prev_x, prev_v = xs[0], gfun(xs[0])
    if prev_v == 0:
        return prev_x, prev_x
    for x in xs[1:]:
        v = gfun(x)
        if v == 0:
            return x, x
        if (v > 0) != (prev_v > 0):
            return prev_x, x
        prev_x, prev_v = x, v
    return None


def _bisect(gfun, lo, hi, tol_log: float, mp_mode: bool):
    """Bisection on a sign-changing bracket until ``log|g| <= tol_log``."""
    glo = gfun(lo)
    if glo == 0:
        return lo
    ghi = gfun(hi)
    if ghi == 0:
        return hi
    best, best_abs = (lo, abs(glo)) if abs(glo) < abs(ghi) else (hi, abs(ghi))
    for _ in range(20000):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi:
            break
        gm = gfun(mid)
        am = abs(gm)
        if am < best_abs:
            best, best_abs = mid, am
        if am == 0:
            return mid
        lg = float(mpmath.log(am)) if mp_mode else math.log(am)
        if lg <= tol_log:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return best


def ivt_solve(
    f: GSF,
    a: Number,
    b: Number,
    y: Number,
    q_target: int = 12,
    dps: Optional[Union[int, Callable]] = None,
    return_residual: bool = False,
):
    """A point ``c`` in ``[a, b]`` with ``|f_eps(c_eps) - y_eps| <= rho_eps**q_target``.

    Requires ``f(a) <= y <= f(b)`` (or the reverse) in the grid sense. The
    bracket is taken per eps; slices where it fails are scanned for a sign
    change, so ``c_eps`` may jump between grid points. With ``dps`` the
    search runs in mpmath at that many digits (int, or a function of eps).
    With ``return_residual`` the pair ``(c, f(c) - y)`` is returned, the
    residual computed at the working precision of the search.
    """
    g = f.gauge
    a, b, y = _gen(a, g), _gen(b, g), _gen(y, g)
    fa, fb = f(a), f(b)
    up = le(fa, y) is Trilean.TRUE and le(y, fb) is Trilean.TRUE
    down = le(fb, y) is Trilean.TRUE and le(y, fa) is Trilean.TRUE
    if not (up or down):
        raise BracketViolation("y is not between f(a) and f(b)")
    net = f.net
    cache: dict = {}

    def solve(e):
        if e not in cache:
            cache[e] = _solve(e)
        return cache[e]

    def _solve(e):
        tol_log = q_target * g.log_rho(e)
        digits = dps(e) if callable(dps) else dps
        if digits:
            with mpmath.workdps(int(digits)):
                lo, hi, yv = mpmath.mpf(a.value(e)), mpmath.mpf(b.value(e)), mpmath.mpf(y.value(e))
                gfun = lambda c: _jet_call(net, e, c) - yv
                if (gfun(lo) > 0) == (gfun(hi) > 0) and gfun(lo) != 0 and gfun(hi) != 0:
                    br = _scan_bracket(lambda c: gfun(mpmath.mpf(c)), float(lo), float(hi), net.features(e))
                    if br is None:
                        raise BracketViolation(f"no sign change on the slice eps={e}")
                    lo, hi = mpmath.mpf(br[0]), mpmath.mpf(br[1])
                c = _bisect(gfun, lo, hi, tol_log, True)
                return c, gfun(c)
        lo, hi, yv = float(a.value(e)), float(b.value(e)), float(y.value(e))
        gfun = lambda c: float(net(e, c)) - yv
        if (gfun(lo) > 0) == (gfun(hi) > 0) and gfun(lo) != 0 and gfun(hi) != 0:
            br = _scan_bracket(gfun, lo, hi, net.features(e))
            if br is None:
                raise BracketViolation(f"no sign change on the slice eps={e}")
            lo, hi = br
        c = _bisect(gfun, lo, hi, tol_log, False)
        return c, gfun(c)

    c = GenNum(g, lambda e: solve(e)[0], name="ivt")
    if return_residual:
        return c, GenNum(g, lambda e: solve(e)[1], name="ivt_residual")
    return c


def mvt_point(f: GSF, a: Number, b: Number) -> GenNum:
    """Per-eps ``c`` in ``(a, b)`` with ``f(b) - f(a) = (b - a) f'(c)``."""
    g = f.gauge
    a, b = _gen(a, g), _gen(b, g)
    net = f.net

    def rep(e):
        lo, hi = float(a.value(e)), float(b.value(e))
        slope = (float(net(e, hi)) - float(net(e, lo))) / (hi - lo)
        dfun = lambda c: net.derivatives(e, c, 1)[1] - slope
        br = _scan_bracket(dfun, lo, hi, net.features(e))
        if br is None:
            # f' - slope never changes sign on the scan: take the closest point
            xs = np.linspace(lo, hi, SCAN_POINTS)
            return float(xs[int(np.argmin([abs(dfun(x)) for x in xs]))])
        if br[0] == br[1]:
            return br[0]
        return optimize.brentq(dfun, br[0], br[1], xtol=1e-15, rtol=4 * np.finfo(float).eps)

    return GenNum(g, rep, name="mvt")


# ---------------------------------------------------------------------------
# extreme values
# ---------------------------------------------------------------------------


def _newton_refine(net: SmoothNet, e, x, lo, hi, better):
    fx = float(net(e, x))
    for _ in range(40):
        try:
            _, d1, d2 = net.derivatives(e, x, 2)
        except (ZeroDivisionError, OverflowError, ValueError):
            break
        if d2 == 0 or not math.isfinite(d1 / d2):
            break
        nx = x - d1 / d2
        if not lo <= nx <= hi:
            break
        fn = float(net(e, nx))
        if not better(fn, fx) and fn != fx:
            break
        if nx == x:
            break
        x, fx = nx, fn
    return x, fx


def extreme_values(f: GSF, K: FunctCompact) -> tuple[GenNum, GenNum]:
    """Per-eps minimizer ``m`` and maximizer ``M`` of ``f`` over ``K``
    (dense scan plus feature points, then Newton polishing on ``f'``)."""
    g = f.gauge
    net = f.net
    cache: dict = {}

    def solve(e):
        if e in cache:
            return cache[e]
        iv = K.base.intervals(e)
        if iv is None:
            raise NotImplementedError("extreme values are computed on 1-D interval slices")
        marks = sorted(set(net.features(e) + net.breakpoints(e)))
        # extrema of a spike lie between its feature points, below the scan spacing
        marks += [0.5 * (p + q) for p, q in zip(marks, marks[1:])]
        cands = []
        for lo, hi in iv:
            xs = list(np.linspace(lo, hi, SCAN_POINTS)) + [p for p in marks if lo <= p <= hi]
            cands += [(float(x), lo, hi) for x in xs]
        vals = [float(net(e, x)) for x, _, _ in cands]
        order = np.argsort(vals, kind="stable")
        out = []
        for idx_list, better in ((order[:3], lambda u, v: u < v), (order[::-1][:3], lambda u, v: u > v)):
            best_x, best_v = None, None
            for i in idx_list:
                x, lo, hi = cands[i]
                rx, rv = _newton_refine(net, e, x, lo, hi, better)
                if best_v is None or better(rv, best_v):
                    best_x, best_v = rx, rv
            out.append(best_x)
        cache[e] = tuple(out)
        return cache[e]

    m = GenNum(g, lambda e: solve(e)[0], name="argmin")
    M = GenNum(g, lambda e: solve(e)[1], name="argmax")
    return m, M


# ---------------------------------------------------------------------------
# Taylor
# ---------------------------------------------------------------------------


def taylor_remainder(f: GSF, a: Number, k: Number, n: int) -> tuple[GenNum, str, OrderEstimate]:
    """Integral-form remainder ``k**(n+1)/n! * int_0^1 (1-t)**n f^(n+1)(a+tk) dt``.

    Returns ``(remainder, verdict, estimate)``; the verdict is
    ``"Infinitesimal"`` when the remainder classifies Negligible or with
    positive slope.
    """
    g = f.gauge
    a, k = _gen(a, g), _gen(k, g)
    net = f.net
    errs: dict = {}

    def rep(e):
        a0, k0 = float(a.value(e)), float(k.value(e))
        if k0 == 0:
            errs[e] = 0.0
            return 0.0
        pts = [(p - a0) / k0 for p in net.features(e) + net.breakpoints(e)]
        val, err = _quad(lambda t: (1 - t) ** n * net.derivatives(e, a0 + t * k0, n + 1)[n + 1], 0.0, 1.0, pts)
        scale = k0 ** (n + 1) / math.factorial(n)
        errs[e] = abs(scale) * err
        return scale * val

    def err(e):
        if e not in errs:
            rep(e)
        return errs[e]

    R = GenNum(g, rep, err=err, name="remainder")
    est = classify_order(R)
    return R, ("Infinitesimal" if est.is_infinitesimal else "NotInfinitesimal"), est


def taylor_polynomial(f: GSF, a: Number, k: Number, n: int) -> GenNum:
    """``sum_{j<=n} f^(j)(a)/j! k**j`` as a net."""
    g = f.gauge
    a, k = _gen(a, g), _gen(k, g)
    return GenNum(
        g,
        lambda e: sum(c * k.value(e) ** j for j, c in enumerate(f.net.taylor(e, a.value(e), n))),
        name="taylor",
    )
