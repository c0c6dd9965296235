"""Gauges, generalized numbers as sampled nets, and asymptotic order tests.

A generalized number is represented by a net ``eps -> x_eps``. Only the
values on a finite geometric grid of ``eps`` are ever inspected, so every
asymptotic statement made here is a grid certificate with explicit,
configurable thresholds.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

import mpmath
import numpy as np

from .ext import ExtReal


class GaugeMismatch(ValueError):
    pass


class DimMismatch(ValueError):
    pass


class NonFiniteSample(ArithmeticError):
    def __init__(self, eps, value):
        super().__init__(f"non-finite sample {value!r} at eps={eps!r}")
        self.eps = eps
        self.value = value


class Trilean(enum.Enum):
    TRUE = "True"
    FALSE = "False"
    UNDETERMINED = "Undetermined"

    def __bool__(self):
        raise TypeError("a Trilean has no truth value; compare against Trilean.TRUE")

    @classmethod
    def of(cls, flag: bool) -> "Trilean":
        return cls.TRUE if flag else cls.FALSE

    def __invert__(self):
        if self is Trilean.UNDETERMINED:
            return self
        return Trilean.FALSE if self is Trilean.TRUE else Trilean.TRUE


class Classification(str, enum.Enum):
    NEGLIGIBLE = "Negligible"
    MODERATE = "Moderate"
    NOT_MODERATE = "NotModerate"
    UNDETERMINED = "Undetermined"


def _log_abs(v) -> float:
    """log|v| for floats, Fractions, mpf values, ExtReal values and huge ints."""
    if isinstance(v, ExtReal):
        return v.log_abs
    if isinstance(v, Fraction):
        return math.log(abs(v.numerator)) - math.log(v.denominator)
    if isinstance(v, mpmath.mpf):
        return float(mpmath.log(abs(v)))
    if isinstance(v, int) and abs(v) > 2**1000:
        return math.log(abs(v))
    return math.log(abs(float(v)))


def magnitude(v):
    """|v| with the Euclidean norm for vector samples."""
    if isinstance(v, np.ndarray):
        return float(np.linalg.norm(v))
    return abs(v)


def _is_finite(v) -> bool:
    if isinstance(v, np.ndarray):
        return bool(np.all(np.isfinite(v)))
    if isinstance(v, (Fraction, int)):
        return True
    if isinstance(v, ExtReal):
        return v.sign == 0 or math.isfinite(v.log_abs)
    if isinstance(v, mpmath.mpf):
        return bool(mpmath.isfinite(v))
    return math.isfinite(v)


@dataclass(frozen=True)
class Gauge:
    """The infinitesimal net ``rho`` and the sampling grid ``eps_k = eps0*theta**k``.

    ``log_rho`` may be given in closed form when ``rho`` itself underflows
    (for instance ``rho = exp(-1/eps)``); ``loglog_inv`` evaluates
    ``log(-log rho)`` for gauges too small even for that.
    """

    rho: Callable[[float], float] = field(default=lambda e: e)
    log_rho_fn: Optional[Callable[[float], float]] = None
    loglog_inv_fn: Optional[Callable[[float], float]] = None
    k_min: int = 4
    k_max: int = 48
    eps0: float = 1.0
    theta: float = 0.5
    q_max: int = 15
    n_max: int = 15
    name: str = "eps"

    def __post_init__(self):
        if len(self.indices) < 16:
            raise ValueError("the grid needs at least 16 points")
        if not 0.0 < self.theta < 1.0:
            raise ValueError("theta must lie in (0, 1)")

    # -- grid ------------------------------------------------------------------
    @property
    def indices(self) -> range:
        return range(self.k_min, self.k_max + 1)

    @property
    def grid(self) -> list[float]:
        return [self.eps_at(k) for k in self.indices]

    def eps_at(self, k: int) -> float:
        return self.eps0 * self.theta ** k

    @property
    def tail_slice(self) -> slice:
        n = len(self.indices)
        return slice(n - (n + 1) // 2, n)

    @property
    def quarter_slice(self) -> slice:
        n = len(self.indices)
        return slice(n - max(4, n // 4), n)

    @property
    def tail(self) -> list[float]:
        return self.grid[self.tail_slice]

    @property
    def quarter(self) -> list[float]:
        return self.grid[self.quarter_slice]

    # -- evaluators --------------------------------------------------------------
    def log_rho(self, eps) -> float:
        if self.log_rho_fn is not None:
            return float(self.log_rho_fn(eps))
        r = self.rho(eps)
        if r <= 0:
            raise ValueError(f"gauge underflows at eps={eps}; supply log_rho_fn")
        return _log_abs(r)

    def loglog_inv(self, eps) -> float:
        """``log(-log rho_eps)``, i.e. ``log log (1/rho_eps)``."""
        if self.loglog_inv_fn is not None:
            return float(self.loglog_inv_fn(eps))
        return math.log(-self.log_rho(eps))

    def rho_pow(self, eps, q) -> float:
        """``rho_eps**q`` computed as ``exp(q*log rho)``; 0 or inf on over/underflow."""
        if self.log_rho_fn is None:
            r = self.rho(eps)
            if isinstance(q, int) and not isinstance(r, float):
                return r ** q
            if r > 0:
                try:
                    return r ** q
                except OverflowError:
                    return math.inf
        t = q * self.log_rho(eps)
        if t > 709.0:
            return math.inf
        return math.exp(t)

    def check(self) -> None:
        """Raise ValueError unless ``0 < rho <= 1`` and ``rho`` strictly
        decreases along the grid tail."""
        logs = [self.log_rho(e) for e in self.grid]
        if any(v > 0 for v in logs):
            raise ValueError("rho must not exceed 1 on the grid")
        tl = logs[self.tail_slice]
        if any(b >= a for a, b in zip(tl, tl[1:])):
            raise ValueError("rho must be strictly decreasing along the grid tail")

    # -- constructors --------------------------------------------------------
    def num(self, rep: Callable, dim: int = 1, err: Optional[Callable] = None, name: str = "") -> "GenNum":
        return GenNum(self, rep, dim=dim, err=err, name=name)

    def const(self, c) -> "GenNum":
        return GenNum(self, lambda e, c=c: c, dim=_dim_of(c), name=repr(c))

    def drho(self, q=1) -> "GenNum":
        if q == 1 and self.log_rho_fn is None:
            return GenNum(self, self.rho, name="drho")
        return GenNum(self, lambda e: self.rho_pow(e, q), name=f"drho^{q}")

    def same_as(self, other: "Gauge") -> bool:
        return self is other or self == other


STANDARD = Gauge()


def _dim_of(v) -> int:
    if isinstance(v, np.ndarray):
        return int(v.size)
    return 1


class GenNum:
    """A generalized number given by a representative net.

    ``rep(eps)`` must be total on the grid. ``err(eps)``, when given, is an
    absolute error bound on the computed sample (quadrature, bisection);
    samples within their bound of zero are treated as zero by the order tests.
    Values are immutable; the sample cache is shared safely between threads.
    """

    __slots__ = ("gauge", "dim", "_rep", "_err", "_cache", "_lock", "name")

    def __init__(self, gauge: Gauge, rep: Callable, dim: int = 1, err: Optional[Callable] = None, name: str = ""):
        self.gauge = gauge
        self.dim = dim
        self._rep = rep
        self._err = err
        self._cache: dict = {}
        self._lock = threading.Lock()
        self.name = name

    def __repr__(self):
        return f"GenNum({self.name or self._rep!r}, dim={self.dim})"

    def value(self, eps):
        with self._lock:
            if eps in self._cache:
                return self._cache[eps]
        v = self._rep(eps)
        with self._lock:
            return self._cache.setdefault(eps, v)

    __call__ = value

    def error(self, eps) -> float:
        return 0.0 if self._err is None else float(self._err(eps))

    @property
    def exact(self) -> bool:
        return self._err is None

    def samples(self, grid: Optional[Sequence[float]] = None) -> list:
        return [self.value(e) for e in (self.gauge.grid if grid is None else grid)]

    def tail_samples(self) -> list:
        return self.samples(self.gauge.tail)

    # -- arithmetic -------------------------------------------------------------
    def _lift(self, other) -> "GenNum":
        if isinstance(other, GenNum):
            if not self.gauge.same_as(other.gauge):
                raise GaugeMismatch("operands live on different gauges")
            if other.dim != self.dim and 1 not in (other.dim, self.dim):
                raise DimMismatch(f"dimensions {self.dim} and {other.dim} differ")
            return other
        return self.gauge.const(other)

    def _combine(self, other, op, err_rule, name):
        y = self._lift(other)
        x = self
        err = None
        if x._err is not None or y._err is not None:
            err = lambda e: err_rule(x, y, e)
        return GenNum(x.gauge, lambda e: op(x.value(e), y.value(e)), dim=max(x.dim, y.dim), err=err, name=name)

    def __add__(self, other):
        return self._combine(other, lambda a, b: a + b, lambda x, y, e: x.error(e) + y.error(e), "add")

    def __radd__(self, other):
        return self._lift(other) + self

    def __sub__(self, other):
        return self._combine(other, lambda a, b: a - b, lambda x, y, e: x.error(e) + y.error(e), "sub")

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        def err(x, y, e):
            ex, ey = x.error(e), y.error(e)
            return float(magnitude(x.value(e))) * ey + float(magnitude(y.value(e))) * ex + ex * ey

        return self._combine(other, lambda a, b: a * b, err, "mul")

    def __rmul__(self, other):
        return self._lift(other) * self

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def reciprocal(self) -> "GenNum":
        x = self

        def err(e):
            v = float(magnitude(x.value(e)))
            ex = x.error(e)
            return math.inf if ex >= v else ex / (v * (v - ex))

        return GenNum(x.gauge, lambda e: 1 / x.value(e), dim=x.dim, err=err if x._err is not None else None, name="inv")

    def __neg__(self):
        x = self
        return GenNum(x.gauge, lambda e: -x.value(e), dim=x.dim, err=x._err, name="neg")

    def __pos__(self):
        return self

    def __abs__(self):
        x = self
        return GenNum(x.gauge, lambda e: magnitude(x.value(e)), dim=1, err=x._err, name="abs")

    def __pow__(self, p):
        x = self
        return GenNum(x.gauge, lambda e: x.value(e) ** p, dim=x.dim, name=f"pow{p}")

    def map(self, fn: Callable, name: str = "map") -> "GenNum":
        """Pointwise image ``eps -> fn(x_eps)`` (no error propagation)."""
        x = self
        return GenNum(x.gauge, lambda e: fn(x.value(e)), dim=x.dim, name=name)


def _minmax(x: GenNum, y, pick, name):
    y = x._lift(y)

    def rep(e):
        a, b = x.value(e), y.value(e)
        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            return pick(np.asarray(a), np.asarray(b))
        return pick(a, b)

    err = None
    if x._err is not None or y._err is not None:
        err = lambda e: max(x.error(e), y.error(e))
    return GenNum(x.gauge, rep, dim=max(x.dim, y.dim), err=err, name=name)


def gmin(x: GenNum, y) -> GenNum:
    return _minmax(x, y, lambda a, b: np.minimum(a, b) if isinstance(a, np.ndarray) else min(a, b), "min")


def gmax(x: GenNum, y) -> GenNum:
    return _minmax(x, y, lambda a, b: np.maximum(a, b) if isinstance(a, np.ndarray) else max(a, b), "max")


def interleave(x: GenNum, y: GenNum, K: Callable[[int], bool]) -> GenNum:
    """``z_eps = x_eps`` when the grid exponent ``k`` of ``eps`` satisfies ``K``,
    else ``y_eps``. Off-grid ``eps`` use the nearest grid exponent."""
    y = x._lift(y)
    if x.dim != y.dim:
        raise DimMismatch(f"dimensions {x.dim} and {y.dim} differ")
    g = x.gauge

    def index(e):
        return int(round(math.log(e / g.eps0) / math.log(g.theta)))

    def rep(e):
        return x.value(e) if K(index(e)) else y.value(e)

    err = None
    if x._err is not None or y._err is not None:
        err = lambda e: x.error(e) if K(index(e)) else y.error(e)
    return GenNum(g, rep, dim=x.dim, err=err, name="interleave")


# ---------------------------------------------------------------------------
# order classification
# ---------------------------------------------------------------------------


# slopes closer to zero than this are treated as zero (fit noise)
SLOPE_TOL = 1e-6


@dataclass(frozen=True)
class OrderEstimate:
    """Result of fitting ``|x_eps| ~ rho_eps**slope`` on the grid tail.

    ``residual`` is the RMS fit error in exponent units. ``min_exponent`` is
    the smallest pointwise exponent ``log|x|/log rho`` over the last quarter.
    ``log_power`` is the coefficient of ``log|log rho|`` in the log-corrected fit.
    """

    classification: Classification
    slope: float
    residual: float
    min_exponent: float
    log_power: Optional[float] = None
    points: int = 0

    @property
    def is_infinite(self) -> bool:
        return self.classification is Classification.MODERATE and self.slope < -SLOPE_TOL

    @property
    def is_infinitesimal(self) -> bool:
        return self.classification is Classification.NEGLIGIBLE or (
            self.classification is Classification.MODERATE and self.slope > SLOPE_TOL
        )

    def as_dict(self) -> dict:
        d = {
            "classification": self.classification.value,
            "slope": _json_float(self.slope),
            "residual": _json_float(self.residual),
            "min_exponent": _json_float(self.min_exponent),
            "infinite": self.is_infinite,
        }
        if self.log_power is not None:
            d["log_power"] = _json_float(self.log_power)
        return d


def _json_float(v):
    if v is None:
        return None
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if math.isnan(v):
        return "nan"
    return v


RESIDUAL_LIMIT = 0.5
NEGLIGIBLE_DECREASE = 0.5


def cofinal(flags: Sequence[bool]) -> bool:
    """A predicate holds co-finally on the last-quarter grid points when it
    holds on at least a third of them, including one of the last three."""
    n = len(flags)
    return sum(flags) >= math.ceil(n / 3) and any(flags[-3:])


def exponents(x: GenNum, grid: Sequence[float]) -> list[float]:
    """Pointwise exponents ``log|x_eps| / log rho_eps``; ``inf`` for zero samples."""
    g = x.gauge
    out = []
    for e in grid:
        v = x.value(e)
        if not _is_finite(v):
            raise NonFiniteSample(e, v)
        m = magnitude(v)
        if m == 0 or m <= x.error(e):
            out.append(math.inf)
        else:
            out.append(_log_abs(m) / g.log_rho(e))
    return out


def classify_order(x: GenNum, log_corrected: bool = False) -> OrderEstimate:
    """Classify ``x`` as Negligible, Moderate(slope), NotModerate or Undetermined.

    Every grid sample must be finite (NonFiniteSample otherwise). Let ``t`` be
    the pointwise exponent over the last quarter of the grid:

    * Negligible: all samples vanish there, or ``min t > q_max`` and ``t``
      drops by less than 0.5 across the quarter;
    * NotModerate: ``t < -N_max`` co-finally;
    * Moderate: least-squares slope over the nonzero tail samples, when the
      residual is at most 0.5 exponent units (Undetermined otherwise, or when
      fewer than three nonzero tail samples exist).
    """
    g = x.gauge
    for e in g.grid:
        v = x.value(e)
        if not _is_finite(v):
            raise NonFiniteSample(e, v)
    tq = exponents(x, g.quarter)
    finite = [t for t in tq if math.isfinite(t)]
    min_t = min(tq)
    if not finite:
        return OrderEstimate(Classification.NEGLIGIBLE, math.inf, 0.0, math.inf, points=len(tq))
    if min_t > g.q_max:
        first = next(t for t in tq if math.isfinite(t))
        last = next(t for t in reversed(tq) if math.isfinite(t))
        if last - first > -NEGLIGIBLE_DECREASE:
            return OrderEstimate(Classification.NEGLIGIBLE, min_t, 0.0, min_t, points=len(tq))
    if cofinal([t < -g.n_max for t in tq]):
        return OrderEstimate(Classification.NOT_MODERATE, min_t, 0.0, min_t, points=len(tq))

    xs, ys = [], []
    for e in g.tail:
        m = magnitude(x.value(e))
        if m == 0 or m <= x.error(e):
            continue
        xs.append(g.log_rho(e))
        ys.append(_log_abs(m))
    if len(xs) < 3:
        return OrderEstimate(Classification.UNDETERMINED, math.nan, math.inf, min_t, points=len(xs))
    X = np.asarray(xs)
    Y = np.asarray(ys)
    cols = [X, np.ones_like(X)]
    if log_corrected:
        cols.insert(1, np.log(np.abs(X)))
    A = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(A, Y, rcond=None)
    fit = A @ coef
    scale = float(np.mean(np.abs(X)))
    residual = float(np.sqrt(np.mean((Y - fit) ** 2))) / scale
    slope = float(coef[0])
    log_power = float(coef[1]) if log_corrected else None
    cls = Classification.MODERATE if residual <= RESIDUAL_LIMIT else Classification.UNDETERMINED
    return OrderEstimate(cls, slope, residual, min_t, log_power=log_power, points=len(xs))


def is_negligible(x: GenNum) -> bool:
    return classify_order(x).classification is Classification.NEGLIGIBLE


def strict_positivity_order(x: GenNum) -> Optional[int]:
    """Smallest ``m <= q_max`` with ``x_eps - err_eps > rho_eps**m`` on the whole tail."""
    g = x.gauge
    tail = g.tail
    lows = []
    for e in tail:
        v = x.value(e)
        if not _is_finite(v):
            raise NonFiniteSample(e, v)
        lows.append((v, x.error(e)))
    if any(v - err <= 0 for v, err in lows):
        return None
    for m in range(0, g.q_max + 1):
        ok = True
        for e, (v, err) in zip(tail, lows):
            # compare logs so huge exponents never overflow
            lo = v - err
            if _log_abs(lo) <= m * g.log_rho(e):
                ok = False
                break
        if ok:
            return m
    return None


def is_strictly_positive(x: GenNum) -> Trilean:
    """True when some ``m <= q_max`` has ``x_eps > rho_eps**m`` on the whole grid
    tail; False when ``x_eps <= 0`` co-finally or ``x`` is Negligible;
    Undetermined otherwise (e.g. positive but faster than every power)."""
    if x.dim != 1:
        raise DimMismatch("is_strictly_positive needs a scalar")
    if strict_positivity_order(x) is not None:
        return Trilean.TRUE
    g = x.gauge
    if cofinal([x.value(e) + x.error(e) <= 0 for e in g.quarter]):
        return Trilean.FALSE
    if is_negligible(x):
        return Trilean.FALSE
    return Trilean.UNDETERMINED


def _lift_pair(x, y) -> tuple:
    if not isinstance(x, GenNum):
        if not isinstance(y, GenNum):
            raise TypeError("at least one argument must be a GenNum")
        return y._lift(x), y
    return x, x._lift(y)


def le(x: GenNum, y) -> Trilean:
    """Grid test of ``x <= y``: True when ``max(x-y, 0)`` is Negligible or
    ``x_eps <= y_eps`` on the whole tail; False when ``x - y`` is strictly
    positive; Undetermined otherwise."""
    x, y = _lift_pair(x, y)
    if x.dim != 1 or y.dim != 1:
        raise DimMismatch("le needs scalars")
    d = x - y
    g = x.gauge
    if all(d.value(e) - d.error(e) <= 0 for e in g.tail):
        return Trilean.TRUE
    try:
        if is_negligible(gmax(d, 0.0)):
            return Trilean.TRUE
    except NonFiniteSample:
        pass
    if is_strictly_positive(d) is Trilean.TRUE:
        return Trilean.FALSE
    return Trilean.UNDETERMINED


def lt(x: GenNum, y) -> Trilean:
    """``x < y`` in the sense of strict positivity of ``y - x``."""
    x, y = _lift_pair(x, y)
    return is_strictly_positive(y - x)


def as_gennum(v, gauge: Gauge) -> GenNum:
    if isinstance(v, GenNum):
        return v
    return gauge.const(v)


def net_from_samples(gauge: Gauge, values: Iterable, name: str = "samples") -> GenNum:
    """A GenNum whose representative is given by a table over the grid."""
    table = dict(zip(gauge.grid, values))
    return GenNum(gauge, table.__getitem__, name=name)
