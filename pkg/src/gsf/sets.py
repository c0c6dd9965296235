"""Nets of subsets of R^n described by distance evaluators.

A set net gives, for each ``eps``, the distance of a point to the slice
``A_eps`` and to its complement. Structured kinds (boxes, balls, finite point
sets, finite unions, convergent sequences, uniform grids) use closed forms;
:class:`GenericSet` falls back to grid minimization over a bounding box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .gauge import (
    Classification,
    GenNum,
    Gauge,
    Trilean,
    classify_order,
    is_strictly_positive,
    strict_positivity_order,
    cofinal,
)


class EmptyCover(ValueError):
    pass


def _as_fn(v) -> Callable:
    if isinstance(v, GenNum):
        return v.value
    if callable(v):
        return v
    if isinstance(v, (list, tuple)):
        v = np.asarray(v, dtype=float)
    return lambda eps, v=v: v


def _vec(x) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=float))


def _merge(intervals: Sequence[tuple]) -> list[tuple]:
    out: list[list] = []
    for a, b in sorted(intervals):
        if a > b:
            continue
        if out and a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return [(a, b) for a, b in out]


def _union_length(intervals: Sequence[tuple]) -> float:
    return float(sum(b - a for a, b in _merge(intervals)))


class SetNet:
    kind = "Generic"
    dim = 1

    def dist(self, eps, x) -> float:
        raise NotImplementedError

    def codist(self, eps, x) -> float:
        raise NotImplementedError

    def contains(self, eps, x) -> bool:
        return self.dist(eps, x) == 0

    def is_empty(self, eps) -> bool:
        return False

    def intervals(self, eps) -> Optional[list[tuple]]:
        """Closed intervals making up a 1-D slice, when known in closed form."""
        return None

    def bounding_radius(self, eps) -> float:
        raise NotImplementedError

    def base_measure(self, eps) -> float:
        iv = self.intervals(eps)
        if iv is None:
            raise NotImplementedError(f"no closed-form measure for {self.kind}")
        return _union_length(iv)

    def measure_of_enlargement(self, eps, r: float) -> float:
        """Lebesgue measure of the closed ``r``-enlargement of the slice."""
        iv = self.intervals(eps)
        if iv is None:
            raise NotImplementedError(f"no closed-form enlargement measure for {self.kind}")
        return _union_length([(a - r, b + r) for a, b in iv])

    def enlargement_excess(self, eps, r: float) -> float:
        """``measure_of_enlargement(r) - base_measure``, computed without
        cancellation where a closed form allows it."""
        iv = self.intervals(eps)
        if iv is None:
            return self.measure_of_enlargement(eps, r) - self.base_measure(eps)
        merged = _merge(iv)
        # each merged piece grows by 2r, minus overlaps between neighbours
        extra = 2.0 * r * len(merged)
        for (a0, b0), (a1, b1) in zip(merged, merged[1:]):
            gap = a1 - b0
            if gap < 2 * r:
                extra -= 2 * r - gap
        return extra


class Box(SetNet):
    """Axis-aligned box ``[lo, hi]`` (or its interior when ``open=True``)."""

    kind = "Box"

    def __init__(self, lo, hi, open: bool = False):
        self._lo = _as_fn(lo)
        self._hi = _as_fn(hi)
        self.open = open
        self.dim = int(_vec(self._lo(1.0)).size) if not isinstance(lo, GenNum) else lo.dim

    def bounds(self, eps):
        return _vec(self._lo(eps)), _vec(self._hi(eps))

    def dist(self, eps, x):
        lo, hi = self.bounds(eps)
        x = _vec(x)
        d = np.maximum(np.maximum(lo - x, 0.0), x - hi)
        return float(np.linalg.norm(d)) if d.size > 1 else float(d[0])

    def codist(self, eps, x):
        lo, hi = self.bounds(eps)
        x = _vec(x)
        if np.any(x <= lo) or np.any(x >= hi):
            return 0.0
        return float(min(np.min(x - lo), np.min(hi - x)))

    def contains(self, eps, x):
        lo, hi = self.bounds(eps)
        x = _vec(x)
        if self.open:
            return bool(np.all(x > lo) and np.all(x < hi))
        return bool(np.all(x >= lo) and np.all(x <= hi))

    def is_empty(self, eps):
        lo, hi = self.bounds(eps)
        return bool(np.any(lo > hi))

    def intervals(self, eps):
        if self.dim != 1:
            return None
        lo, hi = self.bounds(eps)
        return [(float(lo[0]), float(hi[0]))]

    def bounding_radius(self, eps):
        lo, hi = self.bounds(eps)
        return float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))

    def base_measure(self, eps):
        lo, hi = self.bounds(eps)
        return float(np.prod(np.maximum(hi - lo, 0.0)))

    def _steiner(self, eps, r, with_volume: bool):
        lo, hi = self.bounds(eps)
        w = np.maximum(hi - lo, 0.0)
        n = w.size
        if n == 1:
            terms = [w[0], 2.0 * r]
        elif n == 2:
            terms = [w[0] * w[1], 2.0 * r * (w[0] + w[1]), math.pi * r * r]
        elif n == 3:
            a, b, c = w
            terms = [a * b * c, 2.0 * r * (a * b + b * c + a * c), math.pi * r * r * (a + b + c), 4.0 / 3.0 * math.pi * r ** 3]
        else:
            raise NotImplementedError("closed-form enlargements are provided for n <= 3")
        if not with_volume:
            terms = terms[1:]
        return float(sum(terms))

    def measure_of_enlargement(self, eps, r):
        return self._steiner(eps, r, True)

    def enlargement_excess(self, eps, r):
        return self._steiner(eps, r, False)


def interval(a, b, open: bool = False) -> Box:
    return Box(a, b, open=open)


class Ball(SetNet):
    """Euclidean ball ``B_r(c)``, open by default."""

    kind = "Ball"

    def __init__(self, center, radius, open: bool = True):
        self._c = _as_fn(center)
        self._r = _as_fn(radius)
        self.open = open
        self.dim = int(_vec(self._c(1.0)).size) if not isinstance(center, GenNum) else center.dim

    def dist(self, eps, x):
        c, r = _vec(self._c(eps)), float(self._r(eps))
        return max(float(np.linalg.norm(_vec(x) - c)) - r, 0.0)

    def codist(self, eps, x):
        c, r = _vec(self._c(eps)), float(self._r(eps))
        return max(r - float(np.linalg.norm(_vec(x) - c)), 0.0)

    def contains(self, eps, x):
        c, r = _vec(self._c(eps)), float(self._r(eps))
        d = float(np.linalg.norm(_vec(x) - c))
        return d < r if self.open else d <= r

    def intervals(self, eps):
        if self.dim != 1:
            return None
        c, r = float(_vec(self._c(eps))[0]), float(self._r(eps))
        return [(c - r, c + r)]

    def bounding_radius(self, eps):
        return float(np.linalg.norm(_vec(self._c(eps)))) + float(self._r(eps))

    def base_measure(self, eps):
        r = float(self._r(eps))
        return 2 * r if self.dim == 1 else math.pi * r * r if self.dim == 2 else _unsupported()

    def measure_of_enlargement(self, eps, s):
        r = float(self._r(eps)) + s
        return 2 * r if self.dim == 1 else math.pi * r * r if self.dim == 2 else _unsupported()

    def enlargement_excess(self, eps, s):
        r = float(self._r(eps))
        return 2 * s if self.dim == 1 else math.pi * s * (2 * r + s) if self.dim == 2 else _unsupported()


def _unsupported():
    raise NotImplementedError("closed forms are provided for n <= 2")


class FinitePoints(SetNet):
    kind = "FinitePoints"

    def __init__(self, points):
        self._p = _as_fn(points)
        self.dim = self._array(1.0).shape[1]

    def _array(self, eps) -> np.ndarray:
        p = np.asarray(self._p(eps), dtype=float)
        if p.ndim == 1:
            p = p[:, None]
        return p

    def dist(self, eps, x):
        p = self._array(eps)
        return float(np.min(np.linalg.norm(p - _vec(x)[None, :], axis=1)))

    def codist(self, eps, x):
        return 0.0

    def intervals(self, eps):
        if self.dim != 1:
            return None
        return [(float(v), float(v)) for v in self._array(eps)[:, 0]]

    def bounding_radius(self, eps):
        return float(np.max(np.linalg.norm(self._array(eps), axis=1)))

    def base_measure(self, eps):
        return 0.0

    def measure_of_enlargement(self, eps, r):
        p = self._array(eps)
        if self.dim == 1:
            v = np.sort(p[:, 0])
            gaps = np.diff(v)
            return float(2 * r + np.sum(np.minimum(gaps, 2 * r)))
        if self.dim == 2:
            if len(p) > 1:
                d = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=2)
                d[np.diag_indices(len(p))] = np.inf
                if np.min(d) < 2 * r:
                    raise NotImplementedError("overlapping disks: use GenericSet grid counting")
            return float(len(p) * math.pi * r * r)
        raise NotImplementedError("closed forms are provided for n <= 2")

    def enlargement_excess(self, eps, r):
        return self.measure_of_enlargement(eps, r)


class FiniteUnion(SetNet):
    """Union of finitely many set nets. In 1-D with interval members the
    distances are exact; otherwise ``codist`` is the max over members, a
    lower bound."""

    kind = "FiniteUnion"

    def __init__(self, members: Sequence[SetNet]):
        if not members:
            raise ValueError("a union needs at least one member")
        self.members = list(members)
        self.dim = self.members[0].dim

    def dist(self, eps, x):
        return min(m.dist(eps, x) for m in self.members)

    def codist(self, eps, x):
        iv = self.intervals(eps)
        if iv is not None:
            xv = float(_vec(x)[0])
            for a, b in _merge(iv):
                if a < xv < b:
                    return min(xv - a, b - xv)
            return 0.0
        return max(m.codist(eps, x) for m in self.members)

    def contains(self, eps, x):
        return any(m.contains(eps, x) for m in self.members)

    def intervals(self, eps):
        out = []
        for m in self.members:
            iv = m.intervals(eps)
            if iv is None:
                return None
            out.extend(iv)
        return out

    def bounding_radius(self, eps):
        return max(m.bounding_radius(eps) for m in self.members)

    def measure_of_enlargement(self, eps, r):
        iv = self.intervals(eps)
        if iv is None:
            raise NotImplementedError("closed-form union measure needs 1-D interval members")
        pts = [(a, b) for a, b in iv]
        return _union_length([(a - r, b + r) for a, b in pts])


class ConvergentSequence(SetNet):
    """``{term(n) : n >= n0} U {limit}`` for a strictly decreasing sequence
    converging to ``limit`` (constant in eps).

    ``gap(n) = term(n) - term(n+1)`` should be supplied in a form free of
    cancellation; ``inverse(x)`` (the real ``n`` with ``term(n) = x``) speeds
    up distance queries.
    """

    kind = "ConvergentSequence"
    dim = 1

    def __init__(self, term: Callable, n0: int = 1, limit: float = 0.0, gap: Optional[Callable] = None, inverse: Optional[Callable] = None, name: str = ""):
        self.term = term
        self.n0 = n0
        self.limit = limit
        self.gap = gap or (lambda n: term(n) - term(n + 1))
        self.inverse = inverse
        self.name = name

    @classmethod
    def reciprocal(cls) -> "ConvergentSequence":
        return cls(lambda n: 1.0 / n, 1, 0.0, gap=lambda n: 1.0 / (n * (n + 1.0)), inverse=lambda x: 1.0 / x, name="1/n")

    @classmethod
    def reciprocal_log(cls) -> "ConvergentSequence":
        return cls(
            lambda n: 1.0 / math.log(n),
            2,
            0.0,
            gap=lambda n: math.log1p(1.0 / n) / (math.log(n) * math.log(n + 1.0)),
            inverse=lambda x: math.exp(1.0 / x) if 1.0 / x < 709 else math.inf,
            name="1/log n",
        )

    def _locate(self, x) -> float:
        """Real index n with term(n) = x (term(n0) >= x > limit)."""
        if self.inverse is not None:
            return self.inverse(x)
        lo, hi = math.log(self.n0), math.log(self.n0) + 1.0
        while self.term(math.exp(hi)) > x:
            hi *= 2
            if hi > 700:
                return math.inf
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.term(math.exp(mid)) > x:
                lo = mid
            else:
                hi = mid
        return math.exp(hi)

    def dist(self, eps, x):
        x = float(_vec(x)[0])
        first = self.term(self.n0)
        if x >= first:
            return x - first
        if x <= self.limit:
            return self.limit - x
        n = self._locate(x)
        best = x - self.limit
        if math.isfinite(n):
            k = max(self.n0, math.floor(n))
            for m in (k - 1, k, k + 1, k + 2):
                if m >= self.n0:
                    best = min(best, abs(self.term(m) - x))
        return best

    def codist(self, eps, x):
        return 0.0

    def bounding_radius(self, eps):
        return max(abs(self.term(self.n0)), abs(self.limit))

    def base_measure(self, eps):
        return 0.0

    def merge_index(self, r: float) -> float:
        """First ``n >= n0`` with ``gap(n) <= 2r`` (gaps decrease in n)."""
        if self.gap(self.n0) <= 2 * r:
            return float(self.n0)
        lo = math.log(self.n0)
        hi = lo + 1.0
        while self.gap(math.exp(hi)) > 2 * r:
            lo = hi
            hi *= 2
            if hi > 705:
                raise OverflowError("merge index beyond float range")
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.gap(math.exp(mid)) > 2 * r:
                lo = mid
            else:
                hi = mid
        n = math.exp(hi)
        if n < 2 ** 52:
            n = float(math.ceil(n - 1e-9))
            while n > self.n0 and self.gap(n - 1) <= 2 * r:
                n -= 1
            while self.gap(n) > 2 * r:
                n += 1
        return n

    def measure_of_enlargement(self, eps, r):
        n_star = self.merge_index(r)
        isolated = (n_star - self.n0) * 2 * r
        return isolated + (self.term(n_star) - self.limit) + 2 * r

    def enlargement_excess(self, eps, r):
        return self.measure_of_enlargement(eps, r)


class UniformGrid(SetNet):
    """``{lo + i*h : i = 0..floor((hi-lo)/h)}`` with spacing ``h = exp(log_h(eps))``.

    The spacing is handled through its logarithm, so grids far finer than
    float resolution (for instance ``h = rho**(1/eps)``) are representable.
    """

    kind = "UniformGrid"
    dim = 1

    def __init__(self, lo: float, hi: float, log_h: Callable):
        self.lo = float(lo)
        self.hi = float(hi)
        self.log_h = log_h

    def spacing(self, eps) -> float:
        t = self.log_h(eps)
        return 0.0 if t < -745 else math.exp(t)

    def _last(self, eps) -> float:
        h = self.spacing(eps)
        if h == 0.0:
            return self.hi
        return self.lo + math.floor((self.hi - self.lo) / h) * h

    def dist(self, eps, x):
        x = float(_vec(x)[0])
        h = self.spacing(eps)
        last = self._last(eps)
        if x <= self.lo:
            return self.lo - x
        if x >= last:
            return x - last
        if h == 0.0:
            return 0.0
        i = round((x - self.lo) / h)
        return abs(x - (self.lo + i * h))

    def codist(self, eps, x):
        return 0.0

    def bounding_radius(self, eps):
        return max(abs(self.lo), abs(self.hi))

    def base_measure(self, eps):
        return 0.0

    def measure_of_enlargement(self, eps, r):
        h = self.spacing(eps)
        last = self._last(eps)
        if 2 * r >= h:
            return (last - self.lo) + 2 * r
        count = math.floor((self.hi - self.lo) / h) + 1
        return count * 2 * r

    def enlargement_excess(self, eps, r):
        return self.measure_of_enlargement(eps, r)


class GenericSet(SetNet):
    """A set given by a membership predicate ``inside(eps, x)`` over a
    bounding box; distances are minimized over a uniform grid with
    ``points`` nodes per axis (lower accuracy, cost ``points**n``)."""

    kind = "Generic"

    def __init__(self, inside: Callable, lo, hi, points: int = 4096):
        self.inside = inside
        self.lo = _vec(lo)
        self.hi = _vec(hi)
        self.dim = self.lo.size
        self.points = points if self.dim == 1 else min(points, 1024)

    def _nodes(self) -> np.ndarray:
        axes = [np.linspace(a, b, self.points) for a, b in zip(self.lo, self.hi)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def _split(self, eps):
        nodes = self._nodes()
        mask = np.array([bool(self.inside(eps, p if self.dim > 1 else p[0])) for p in nodes])
        return nodes[mask], nodes[~mask]

    def dist(self, eps, x):
        x = _vec(x)
        if self.inside(eps, x if self.dim > 1 else x[0]):
            return 0.0
        ins, _ = self._split(eps)
        if len(ins) == 0:
            return math.inf
        return float(np.min(np.linalg.norm(ins - x[None, :], axis=1)))

    def codist(self, eps, x):
        x = _vec(x)
        if not self.inside(eps, x if self.dim > 1 else x[0]):
            return 0.0
        _, out = self._split(eps)
        edge = float(min(np.min(x - self.lo), np.min(self.hi - x)))
        if len(out) == 0:
            return edge
        return float(min(edge, np.min(np.linalg.norm(out - x[None, :], axis=1))))

    def contains(self, eps, x):
        x = _vec(x)
        return bool(self.inside(eps, x if self.dim > 1 else x[0]))

    def bounding_radius(self, eps):
        return float(np.linalg.norm(np.maximum(np.abs(self.lo), np.abs(self.hi))))

    def cell_volume(self) -> float:
        return float(np.prod((self.hi - self.lo) / (self.points - 1)))

    def measure_of_enlargement(self, eps, r):
        """Grid count of nodes within ``r`` (plus half a cell) of the set."""
        ins, _ = self._split(eps)
        nodes = self._nodes()
        h = float(np.max((self.hi - self.lo) / (self.points - 1)))
        if len(ins) == 0:
            return 0.0
        near = np.zeros(len(nodes), dtype=bool)
        for chunk in np.array_split(np.arange(len(nodes)), max(1, len(nodes) // 2048)):
            d = np.min(np.linalg.norm(nodes[chunk][:, None, :] - ins[None, :, :], axis=2), axis=1)
            near[chunk] = d <= r + 0.5 * h
        return float(np.count_nonzero(near) * self.cell_volume())

    def base_measure(self, eps):
        ins, _ = self._split(eps)
        return float(len(ins) * self.cell_volume())


class Enlarged(SetNet):
    """Closed ``r``-enlargement of a base set net."""

    kind = "Enlarged"

    def __init__(self, base: SetNet, r):
        self.base = base
        self._r = _as_fn(r)
        self.dim = base.dim

    def radius(self, eps) -> float:
        return float(self._r(eps))

    def dist(self, eps, x):
        return max(self.base.dist(eps, x) - self.radius(eps), 0.0)

    def codist(self, eps, x):
        # lower bound: a ball of this radius around x stays inside
        return max(self.radius(eps) - self.base.dist(eps, x), 0.0) + self.base.codist(eps, x)

    def intervals(self, eps):
        iv = self.base.intervals(eps)
        if iv is None:
            return None
        r = self.radius(eps)
        return [(a - r, b + r) for a, b in iv]

    def bounding_radius(self, eps):
        return self.base.bounding_radius(eps) + self.radius(eps)

    def base_measure(self, eps):
        return self.base.measure_of_enlargement(eps, self.radius(eps))

    def measure_of_enlargement(self, eps, s):
        return self.base.measure_of_enlargement(eps, self.radius(eps) + s)

    def enlargement_excess(self, eps, s):
        r = self.radius(eps)
        return self.base.enlargement_excess(eps, r + s) - self.base.enlargement_excess(eps, r)


@dataclass
class FunctCompact:
    """A sharply bounded net of compact slices with exact enlargement measures."""

    base: SetNet
    bound: GenNum

    @classmethod
    def of(cls, base: SetNet, gauge: Gauge) -> "FunctCompact":
        return cls(base, GenNum(gauge, base.bounding_radius, name="bound"))

    @property
    def gauge(self) -> Gauge:
        return self.bound.gauge

    @property
    def dim(self) -> int:
        return self.base.dim

    def check(self) -> bool:
        """The bound must be moderate (sharp boundedness)."""
        est = classify_order(self.bound)
        return est.classification in (Classification.MODERATE, Classification.NEGLIGIBLE)

    def measure_of_enlargement(self, eps, r):
        return self.base.measure_of_enlargement(eps, r)

    def enlargement_excess(self, eps, r):
        return self.base.enlargement_excess(eps, r)

    def base_measure(self, eps):
        return self.base.base_measure(eps)


def enlarge(K: FunctCompact, r: GenNum) -> FunctCompact:
    """Per-eps closed ``r_eps``-enlargement of ``K`` (``r`` strictly positive)."""
    if is_strictly_positive(r) is not Trilean.TRUE:
        raise ValueError("the enlargement radius must be strictly positive")
    base = Enlarged(K.base, r)
    return FunctCompact(base, K.bound + r)


# ---------------------------------------------------------------------------
# membership
# ---------------------------------------------------------------------------


def _check_dims(x: GenNum, A: SetNet):
    if x.dim != A.dim:
        from .gauge import DimMismatch

        raise DimMismatch(f"point of dim {x.dim} against set of dim {A.dim}")


def distance_net(x: GenNum, A: SetNet) -> GenNum:
    return GenNum(x.gauge, lambda e: A.dist(e, x.value(e)), name="dist")


def codistance_net(x: GenNum, A: SetNet) -> GenNum:
    return GenNum(x.gauge, lambda e: A.codist(e, x.value(e)), name="codist")


def member_internal(x: GenNum, A: SetNet) -> Trilean:
    """True iff ``d(x_eps, A_eps)`` is Negligible; False iff it is strictly positive."""
    _check_dims(x, A)
    d = distance_net(x, A)
    if classify_order(d).classification is Classification.NEGLIGIBLE:
        return Trilean.TRUE
    if is_strictly_positive(d) is Trilean.TRUE:
        return Trilean.FALSE
    return Trilean.UNDETERMINED


def strong_membership_order(x: GenNum, A: SetNet) -> Optional[int]:
    """Smallest ``q`` with ``d(x_eps, A_eps^c) > rho_eps**q`` on the grid tail."""
    _check_dims(x, A)
    return strict_positivity_order(codistance_net(x, A))


def member_strongly(x: GenNum, A: SetNet) -> Trilean:
    """True iff some ``q <= q_max`` has ``d(x_eps, A_eps^c) > rho_eps**q`` on the
    grid tail; False iff ``x_eps`` lies outside the open slice co-finally or
    the codistance is Negligible; Undetermined otherwise."""
    _check_dims(x, A)
    c = codistance_net(x, A)
    if strict_positivity_order(c) is not None:
        return Trilean.TRUE
    g = x.gauge
    if cofinal([c.value(e) <= 0 for e in g.quarter]):
        return Trilean.FALSE
    if classify_order(c).classification is Classification.NEGLIGIBLE:
        return Trilean.FALSE
    return Trilean.UNDETERMINED


# ---------------------------------------------------------------------------
# Lebesgue number
# ---------------------------------------------------------------------------


def _tent_candidates(cover: Sequence[SetNet], eps, lo: float, hi: float) -> Optional[list[float]]:
    ends = []
    for U in cover:
        iv = U.intervals(eps)
        if iv is None or len(iv) != 1:
            return None
        ends.append(iv[0])
    pts = {lo, hi}
    for a, b in ends:
        pts.update((a, b, 0.5 * (a + b)))
        for a2, b2 in ends:
            pts.add(0.5 * (a + b2))
    return [p for p in pts if lo <= p <= hi]


def _sigma(cover, eps, x) -> float:
    return max(U.codist(eps, x) for U in cover)


def lebesgue_number(cover: Sequence[SetNet], K: FunctCompact, points: int = 4096):
    """Return ``(s, positive)`` with ``s_eps = 1/2 * min_{x in K_eps} max_j d(x, U_j^c)``.

    In 1-D, with interval covers and an interval ``K``, the minimum is exact:
    the objective is piecewise linear and its kinks are enumerated. Otherwise
    the minimum is taken over a grid of ``K_eps`` (an upper estimate of ``s``).
    Empty slices of ``K`` give ``s_eps = 1``.
    """
    if not cover:
        raise EmptyCover("the cover has no members")
    base = K.base

    def rep(eps):
        if base.is_empty(eps):
            return 1.0
        iv = base.intervals(eps)
        if base.dim == 1 and iv is not None:
            best = math.inf
            for lo, hi in _merge(iv):
                cand = _tent_candidates(cover, eps, lo, hi)
                if cand is None:
                    cand = list(np.linspace(lo, hi, points))
                best = min(best, min(_sigma(cover, eps, x) for x in cand))
            return 0.5 * best
        lo = -base.bounding_radius(eps) * np.ones(base.dim)
        hi = -lo
        axes = [np.linspace(a, b, int(round(points ** (1.0 / base.dim)))) for a, b in zip(lo, hi)]
        mesh = np.stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")], axis=1)
        vals = [_sigma(cover, eps, p) for p in mesh if base.contains(eps, p)]
        return 0.5 * min(vals) if vals else 1.0

    s = GenNum(K.gauge, rep, name="lebesgue")
    return s, is_strictly_positive(s)
