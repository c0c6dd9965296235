"""Hypernatural numbers and hyperlimits of hypersequences.

Indices that no float can hold are handled through ``t = log n``; the terms
are evaluated at :class:`~gsf.ext.ExtReal` indices once ``t`` leaves the
float range. A threshold ``M_eps = exp(t_eps)`` is sigma-moderate when
``t_eps <= N * (-log sigma_eps)`` for some ``N <= N_max``; the comparison is
made on logarithms so that doubly exponential gauges stay representable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .ext import ExtReal, log_abs
from .gauge import Classification, Gauge, GenNum, STANDARD, classify_order, cofinal

T_CAP = 1e300
SAMPLES = 48
EXACT_T = 36.0


class NotHypernatural(ValueError):
    pass


class NotExtendable(ValueError):
    pass


@dataclass
class HyperNat:
    """A net of natural numbers, moderate with respect to ``gauge``."""

    gauge: Gauge
    rep: Callable

    def value(self, eps) -> int:
        return self.rep(eps)

    def as_gennum(self) -> GenNum:
        return GenNum(self.gauge, lambda e: float(self.rep(e)), name="hypernat")


def ni(x: GenNum) -> HyperNat:
    """Nearest-integer normal form (ties broken upwards) of a generalized
    number infinitely close to a hypernatural."""
    g = x.gauge

    def rep(e):
        return int(math.floor(float(x.value(e)) + 0.5))

    for e in g.quarter:
        if rep(e) < 0:
            raise NotHypernatural("the nearest integer is negative")
    gap = GenNum(g, lambda e: float(x.value(e)) - rep(e), name="x-ni(x)")
    if classify_order(gap).classification is not Classification.NEGLIGIBLE:
        raise NotHypernatural("the distance to the nearest integer is not negligible")
    return HyperNat(g, rep)


def index_of(t: float):
    """The index ``exp(t)`` as an int, float or ExtReal depending on size."""
    if t <= EXACT_T:
        return math.ceil(math.exp(t) - 1e-9)
    if t < 700:
        return math.exp(t)
    return ExtReal.exp_of(t)


@dataclass
class HyperSeq:
    """``term(eps, n)`` indexed by sigma-hypernaturals, valued in the rho ring."""

    sigma: Gauge
    rho: Gauge
    term: Callable
    name: str = ""

    def at(self, eps, n):
        return self.term(eps, n)


def _t_of_sigma_power(sigma: Gauge, eps, N: float) -> float:
    """``log(sigma_eps**-N)``, capped at ``T_CAP``."""
    ll = sigma.loglog_inv(eps) + math.log(N)
    return T_CAP if ll > math.log(T_CAP) else math.exp(ll)


@dataclass
class HyperlimitResult:
    verdict: str  # Confirmed / Refuted / Undetermined
    failed_q: Optional[int]
    per_q: list = field(default_factory=list)
    limit: Optional[GenNum] = None
    trust: str = "supplied"

    def as_dict(self) -> dict:
        out = {"verdict": self.verdict, "failed_q": self.failed_q, "per_q": self.per_q, "trust": self.trust}
        if self.verdict == "Refuted":
            out["certificate"] = "grid-relative: the required threshold outgrows every sigma^-N, N <= N_max, on the grid tail"
        return out


def _close(a: HyperSeq, eps, t: float, l: float, q: int) -> bool:
    """``|a(exp t) - l| < rho**q`` at one index."""
    try:
        try:
            v = a.at(eps, index_of(t))
        except OverflowError:
            # the float index overflowed inside the term; redo it in log scale
            v = a.at(eps, ExtReal.exp_of(t))
        d = v - l
    except (ArithmeticError, ValueError):
        return False
    ld = log_abs(d)
    if ld == -math.inf:
        return True
    if isinstance(d, float) and not math.isfinite(d):
        return False
    return ld < q * a.rho.log_rho(eps)


def _holds_beyond(a, eps, t, t_end, l, q) -> Optional[float]:
    """Check sampled indices in ``[exp t, exp t_end]``; the first failing
    ``t`` is returned, None when all pass."""
    if t_end <= t:
        return None if _close(a, eps, t, l, q) else t
    span = np.unique(np.concatenate([np.linspace(t, min(t_end, t + 8.0), 9), np.geomspace(max(t, 1e-3), t_end, SAMPLES)]))
    for s in span:
        s = float(s)
        if s < t:
            continue
        if not _close(a, eps, s, l, q):
            return s
    return None


def threshold_log(a: HyperSeq, eps, l: float, q: int, t_check: float) -> float:
    """The smallest ``t = log M`` found with ``|a_n - l| < rho**q`` for the
    sampled ``n`` in ``[M, exp(t_check)]``; ``inf`` beyond the cap."""
    lo, t = 0.0, 0.0
    while True:
        if _close(a, eps, t, l, q):
            bad = _holds_beyond(a, eps, t, max(t_check, 2 * t), l, q)
            if bad is None:
                break
            lo, t = bad, bad * 2 + 1.0
        else:
            lo = t
            t = 2 * t + 1.0
        if t > T_CAP:
            return math.inf
    hi = t
    for _ in range(200):
        if hi - lo <= 1e-12 * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if _close(a, eps, mid, l, q):
            hi = mid
        else:
            lo = mid
    if hi <= EXACT_T:
        # tighten to the least integer index
        M = index_of(hi)
        while M > 1 and _close(a, eps, math.log(M - 1), l, q):
            M -= 1
        while not _close(a, eps, math.log(M), l, q):
            M += 1
        return math.log(M)
    return hi


def _estimate_limit(a: HyperSeq) -> GenNum:
    """Aitken extrapolation over the three largest searchable indices
    ``sigma**-N_max`` (capped), half and a quarter of it in log scale."""
    g = a.rho

    def rep(e):
        t = _t_of_sigma_power(a.sigma, e, a.sigma.n_max)
        try:
            xs = [float(a.at(e, index_of(t * f))) for f in (0.25, 0.5, 1.0)]
        except (TypeError, OverflowError, ValueError):
            t = min(t, 700.0)
            xs = [float(a.at(e, index_of(t * f))) for f in (0.25, 0.5, 1.0)]
        d2 = xs[2] - 2 * xs[1] + xs[0]
        if d2 == 0:
            return xs[2]
        est = xs[2] - (xs[2] - xs[1]) ** 2 / d2
        return est if math.isfinite(est) else xs[2]

    return GenNum(g, rep, name="limit_estimate")


def hyperlimit(a: HyperSeq, l: Union[GenNum, float, None] = None, q_max: int = 6, n_max: Optional[int] = None) -> HyperlimitResult:
    """Test ``hyperlim a_n = l`` for ``q = 1..q_max`` on the grid tail.

    For each ``q`` and ``eps`` the least threshold ``M_eps`` is searched by
    doubling then bisection on ``log M``. The verdict at ``q`` is positive
    when ``M`` is sigma-moderate on the whole last quarter of the grid and
    negative when it is sigma-immoderate co-finally there.
    """
    sigma, rho = a.sigma, a.rho
    n_max = n_max if n_max is not None else sigma.n_max
    trust = "supplied"
    if l is None:
        l = _estimate_limit(a)
        trust = "estimated"
    elif not isinstance(l, GenNum):
        l = rho.const(float(l))
    per_q = []
    verdict, failed = "Confirmed", None
    check_N = 1.0
    for q in range(1, q_max + 1):
        ts, moderate = [], []
        for e in sigma.quarter:
            t_check = min(_t_of_sigma_power(sigma, e, check_N), T_CAP)
            t = threshold_log(a, e, float(l.value(e)), q, t_check)
            ts.append(t)
            ok = math.isfinite(t) and (t <= 0 or math.log(t) <= math.log(n_max) + sigma.loglog_inv(e))
            moderate.append(ok)
        entry = {
            "q": q,
            "log_M": [t if math.isfinite(t) else "inf" for t in ts],
            "sigma_moderate": moderate,
        }
        if all(moderate):
            entry["status"] = "ok"
        elif cofinal([not m for m in moderate]):
            entry["status"] = "refuted"
            entry["witness"] = [
                {"eps": float(e), "log_M": (t if math.isfinite(t) else "inf"), "exceeds": (not math.isfinite(t)) or t > 1.0 / (rho.rho_pow(e, q) + rho.rho_pow(e, 1))}
                for e, t in zip(sigma.quarter, ts)
            ]
        else:
            entry["status"] = "undetermined"
        per_q.append(entry)
        if entry["status"] == "refuted":
            verdict, failed = "Refuted", q
            break
        if entry["status"] == "undetermined" and verdict == "Confirmed":
            verdict, failed = "Undetermined", q
    return HyperlimitResult(verdict, failed, per_q, l, trust)


def extend_sequence(a: Callable, sigma: Gauge = STANDARD, rho: Gauge = STANDARD, n_max: Optional[int] = None) -> HyperSeq:
    """Extend ``n -> a(n)`` (a GenNum per natural ``n``) to sigma-hypernatural
    indices by ``term(eps, n) = a(n)_eps``.

    The growth audit evaluates the terms at ``n = int(sigma**-1)`` and
    ``int(sigma**-2)`` on the last quarter of the grid and rejects sequences
    whose values are non-finite or rho-immoderate there co-finally.
    """
    n_max = n_max if n_max is not None else rho.n_max

    def term(eps, n):
        return a(n).value(eps)

    bad = []
    for e in sigma.quarter:
        fail = False
        for k in (1, 2):
            n = index_of(k * math.exp(sigma.loglog_inv(e)))
            if isinstance(n, float):
                n = int(n)
            try:
                v = term(e, n)
                lv = log_abs(v)
            except (ArithmeticError, ValueError):
                fail = True
                break
            if math.isnan(lv) or lv == math.inf or lv > -n_max * rho.log_rho(e):
                fail = True
                break
        bad.append(fail)
    if cofinal(bad):
        raise NotExtendable("the terms grow faster than any rho^-N at sigma-hypernatural indices")
    return HyperSeq(sigma, rho, term, name="extended")
