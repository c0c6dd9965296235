"""Generalized smooth functions: nets of smooth maps with exact derivatives.

A :class:`SmoothNet` wraps ``fn(eps, x)``. When ``fn`` is written with the
operators and elementary functions of :mod:`gsf.jet`, derivatives of any order
come from jet evaluation; otherwise a flagged finite-difference fallback is
used. :func:`embed` turns a distribution description into a GSF by
convolution with the scaled mollifier net.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np
from scipy import integrate

from . import jet as J_
from .gauge import (
    STANDARD,
    Classification,
    GenNum,
    Gauge,
    NonFiniteSample,
    OrderEstimate,
    Trilean,
    classify_order,
    is_strictly_positive,
)
from .jet import Jet, compose_series, new_tag, real_part
from .mollifier import Mollifier1D, ScaledMollifierNet
from .sets import SetNet, member_internal, member_strongly


class DomainViolation(ValueError):
    pass


class CodomainMismatch(ValueError):
    pass


class UnsupportedDistribution(TypeError):
    pass


FD_STEP = 1e-6


class SmoothNet:
    """A net of smooth maps ``R^n_in -> R^n_out``.

    ``fn(eps, x)`` receives a float (``n_in == 1``) or a tuple of floats, and
    must also accept jets unless ``exact=False``. ``taylor_fn(eps, x0, order)``
    may override the Taylor coefficients of a 1-D net. ``primitive`` is an
    optional SmoothNet whose derivative is this net; ``features(eps)`` lists
    points where the slice has structure (used by scans and quadrature).
    """

    def __init__(
        self,
        fn: Callable,
        n_in: int = 1,
        n_out: int = 1,
        exact: bool = True,
        taylor_fn: Optional[Callable] = None,
        primitive: Optional["SmoothNet"] = None,
        features: Optional[Callable] = None,
        breakpoints: Optional[Callable] = None,
        name: str = "",
    ):
        self.fn = fn
        self.n_in = n_in
        self.n_out = n_out
        self.exact = exact
        self.taylor_fn = taylor_fn
        self.primitive = primitive
        self._features = features
        self._breakpoints = breakpoints
        self.name = name

    def __repr__(self):
        return f"SmoothNet({self.name or self.fn!r})"

    def __call__(self, eps, x):
        return self.fn(eps, x)

    def features(self, eps) -> list[float]:
        return list(self._features(eps)) if self._features else []

    def breakpoints(self, eps) -> list[float]:
        return list(self._breakpoints(eps)) if self._breakpoints else []

    # -- derivatives (1-D input) -----------------------------------------------
    def taylor(self, eps, x0, order: int) -> list:
        """Taylor coefficients ``f^(k)(x0)/k!`` for ``k <= order``."""
        if self.taylor_fn is not None:
            return list(self.taylor_fn(eps, x0, order))
        if not self.exact:
            d = self.fd_derivatives(eps, x0, order)
            return [v / math.factorial(k) for k, v in enumerate(d)]
        return J_.taylor_coefficients(lambda t: self.fn(eps, t), x0, order)

    def derivatives(self, eps, x0, order: int) -> list:
        return [c * math.factorial(k) for k, c in enumerate(self.taylor(eps, x0, order))]

    def fd_derivatives(self, eps, x0, order: int, h: Optional[float] = None) -> list:
        """Central finite differences (lower trust)."""
        h = h or max(FD_STEP, 1e-3 ** (1.0 / max(order, 1)) * 1e-2)
        out = []
        for k in range(order + 1):
            if k == 0:
                out.append(float(self.fn(eps, x0)))
                continue
            s = 0.0
            for j in range(k + 1):
                s += (-1) ** j * math.comb(k, j) * float(self.fn(eps, x0 + (k / 2 - j) * h))
            out.append(s / h ** k)
        return out

    def partial(self, eps, x0: Sequence[float], alpha: Sequence[int]):
        """Mixed partial ``d^alpha f_eps(x0)`` via nested jets."""
        x0 = tuple(float(v) for v in np.atleast_1d(x0))
        if len(alpha) != len(x0):
            raise ValueError("multi-index length must match the input dimension")
        if self.n_in == 1:
            return self.derivatives(eps, x0[0], alpha[0])[alpha[0]]
        args, tags = [], []
        for v, a in zip(x0, alpha):
            t = new_tag()
            tags.append(t)
            args.append(Jet.variable(v, a, t) if a > 0 else v)
        out = self.fn(eps, tuple(args))
        for t, a in zip(tags, alpha):
            if a == 0:
                continue
            if isinstance(out, Jet) and out.tag == t:
                out = out.c[a] if a <= out.order else 0.0
            else:
                out = 0.0
        scale = math.prod(math.factorial(a) for a in alpha)
        return real_part(out) * scale


def _jet_call(net: SmoothNet, eps, x):
    """Evaluate a 1-D net at a float, mpf or jet, using its Taylor data for jets."""
    if isinstance(x, Jet) and net.taylor_fn is not None:
        x0 = x.c[0]
        if isinstance(x0, Jet):
            raise NotImplementedError("nested jets through a Taylor-table net")
        return compose_series(net.taylor_fn(eps, x0, x.order), x)
    return net.fn(eps, x)


@dataclass
class GSF:
    """A generalized smooth function: a smooth net with a declared domain."""

    net: SmoothNet
    gauge: Gauge = STANDARD
    domain: Optional[SetNet] = None
    strict: bool = False
    name: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def n_in(self) -> int:
        return self.net.n_in

    @property
    def n_out(self) -> int:
        return self.net.n_out

    def __call__(self, x) -> GenNum:
        return eval_gsf(self, x)

    def check_domain(self, x: GenNum) -> Trilean:
        if self.domain is None:
            return Trilean.TRUE
        if getattr(self.domain, "open", False):
            return member_strongly(x, self.domain)
        return member_internal(x, self.domain)


def _as_point(x, gauge: Gauge) -> GenNum:
    if isinstance(x, GenNum):
        return x
    return gauge.const(np.asarray(x, dtype=float) if isinstance(x, (list, tuple)) else x)


def eval_gsf(f: GSF, x) -> GenNum:
    """The generalized number ``[f_eps(x_eps)]``."""
    x = _as_point(x, f.gauge)
    if f.domain is not None:
        verdict = f.check_domain(x)
        if verdict is Trilean.FALSE or (f.strict and verdict is not Trilean.TRUE):
            raise DomainViolation(f"point is not in the domain of {f.name or 'f'} ({verdict.value})")
    net = f.net

    def rep(eps):
        v = x.value(eps)
        if net.n_in > 1:
            v = tuple(float(c) for c in np.atleast_1d(v))
        return net(eps, v)

    return GenNum(x.gauge, rep, dim=net.n_out, name=f"{f.name}(x)")


def gsf_from_function(fn: Callable, gauge: Gauge = STANDARD, domain: Optional[SetNet] = None, name: str = "", **kw) -> GSF:
    """GSF from an eps-independent map written with :mod:`gsf.jet` functions."""
    return GSF(SmoothNet(lambda eps, x: fn(x), name=name, **kw), gauge=gauge, domain=domain, name=name)


def identity(gauge: Gauge = STANDARD) -> GSF:
    return gsf_from_function(lambda x: x, gauge, name="id")


def compose(g: GSF, f: GSF) -> GSF:
    """The GSF ``g o f``; derivatives follow from jets (Faa di Bruno)."""
    if g.n_in != f.n_out:
        raise CodomainMismatch(f"outer input dim {g.n_in} != inner output dim {f.n_out}")
    gn, fn = g.net, f.net

    def comp(eps, x):
        return _jet_call(gn, eps, _jet_call(fn, eps, x))

    net = SmoothNet(comp, n_in=f.n_in, n_out=g.n_out, exact=gn.exact and fn.exact, name=f"{g.name}o{f.name}")
    return GSF(net, gauge=f.gauge, domain=f.domain, name=net.name)


# ---------------------------------------------------------------------------
# distributions and embedding
# ---------------------------------------------------------------------------


class DistributionSpec:
    def __add__(self, other):
        return LinearCombination(((1.0, self), (1.0, other)))

    def __rmul__(self, c):
        return LinearCombination(((float(c), self),))

    def __sub__(self, other):
        return LinearCombination(((1.0, self), (-1.0, other)))


@dataclass(frozen=True)
class Delta(DistributionSpec):
    pass


@dataclass(frozen=True)
class Heaviside(DistributionSpec):
    pass


@dataclass(frozen=True)
class SmoothFn(DistributionSpec):
    """A smooth function written with :mod:`gsf.jet` operations."""

    f: Callable
    name: str = "f"


@dataclass(frozen=True)
class CompactC0(DistributionSpec):
    """Continuous compactly supported function: piecewise-linear through
    ``(xs, ys)`` and zero outside ``support``."""

    xs: tuple
    ys: tuple
    support: tuple

    def __post_init__(self):
        a, b = self.support
        if len(self.xs) != len(self.ys) or len(self.xs) < 2:
            raise ValueError("xs and ys must have the same length >= 2")
        if any(np.diff(self.xs) <= 0):
            raise ValueError("xs must be strictly increasing")
        if self.xs[0] < a or self.xs[-1] > b:
            raise ValueError("samples must lie inside the declared support")
        if self.ys[0] != 0 or self.ys[-1] != 0:
            raise ValueError("a continuous compactly supported function must vanish at its ends")

    def __call__(self, y):
        return float(np.interp(y, self.xs, self.ys, left=0.0, right=0.0))


@dataclass(frozen=True)
class DerivativeOf(DistributionSpec):
    spec: DistributionSpec
    order: int = 1


@dataclass(frozen=True)
class LinearCombination(DistributionSpec):
    terms: tuple  # of (coefficient, spec)


def _quad(fn, a, b, points=None, limit=200):
    if a == b:
        return 0.0, 0.0
    pts = None
    if points:
        pts = sorted({p for p in points if a < p < b})
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(fn, a, b, points=pts or None, limit=limit, epsabs=0.0, epsrel=1e-13)
    return val, err


class _KernelData:
    """Per-eps constants of the scaled kernel (tail masses, truncated moments)."""

    def __init__(self, kernel: ScaledMollifierNet, k_max: int):
        self.kernel = kernel
        self.mol: Mollifier1D = kernel.mollifier
        self.k_max = k_max
        self._cache: dict = {}

    def scale(self, eps):
        return self.kernel.scale(eps)

    def _window(self, u, b, L):
        return self.mol(u) * _chi_float(u * L / b)

    def truncated_moments(self, eps) -> list[float]:
        """``c_k = int u**k mu(u) chi(u L/b) du`` for k = 0..k_max (odd ones vanish)."""
        key = ("c", eps)
        if key in self._cache:
            return self._cache[key]
        b, L = self.scale(eps)
        s1, s2 = b / L, 2 * b / L
        out = []
        for k in range(self.k_max + 1):
            if k % 2:
                out.append(0.0)
                continue
            with mpmath.workdps(60):
                g = self.mol.upper_moment(k, s1)
                q = mpmath.mpf(0)
                if s1 < 60:
                    qv, _ = _quad(lambda u: u ** k * self._window(u, b, L), s1, s2)
                    q = mpmath.mpf(qv)
                # vanishing moments hold by construction; drop solver residue
                full = 1 if k == 0 else (0 if k <= 2 * self.mol.J else self.mol.moment(k))
                out.append(float(full - 2 * (g - q)))
        self._cache[key] = out
        return out

    def half_defect(self, eps) -> float:
        """R_b = int_{b/L}^inf mu(u) (1 - chi(u L/b)) du."""
        key = ("R", eps)
        if key in self._cache:
            return self._cache[key]
        b, L = self.scale(eps)
        s1, s2 = b / L, 2 * b / L
        g = self.mol.tail_mass(s1)
        q = _quad(lambda u: self._window(u, b, L), s1, s2)[0] if s1 < 60 else 0.0
        val = g - q
        self._cache[key] = val
        return val

    def window_tail(self, eps, s: float) -> float:
        """T(s) = int_s^inf mu(u) chi(u L/b) du for s >= b/L."""
        b, L = self.scale(eps)
        s2 = 2 * b / L
        if s >= s2 or s > 60:
            return 0.0
        return _quad(lambda u: self._window(u, b, L), s, s2)[0]


def _chi_float(t: float) -> float:
    from .mollifier import chi

    return chi(float(t))


def _kernel_breaks(kernel: ScaledMollifierNet, eps) -> list[float]:
    """Quadrature panel points: half-integer multiples of 1/b near the
    origin, then a geometric ladder out to the cutoff radius."""
    b, L = kernel.scale(eps)
    b, L = float(b), float(L)
    pts = [j / (2 * b) for j in range(-32, 33)]
    r = 16.0 / b
    while r < 2.0 / L:
        r *= 2.0
        pts += [r, -r]
    return pts + kernel.features(eps)


def _delta_net(kernel: ScaledMollifierNet) -> SmoothNet:
    return SmoothNet(kernel, features=kernel.features, breakpoints=lambda e: _kernel_breaks(kernel, e), name="delta")


def _heaviside_net(kernel: ScaledMollifierNet, data: _KernelData) -> SmoothNet:
    mol = kernel.mollifier

    def value(eps, x: float) -> float:
        b, L = kernel.scale(eps)
        s = b * x
        s1 = b / L
        R = data.half_defect(eps)
        a = abs(s)
        if a < s1:
            G = mol.tail_mass(a)
            return 1.0 - R - G if s >= 0 else G - R
        T = data.window_tail(eps, a)
        return 1.0 - 2 * R - T if s >= 0 else T

    def taylor(eps, x0, order):
        x0f = float(x0)
        out = [value(eps, x0f)]
        if order >= 1:
            kj = J_.taylor_coefficients(lambda t: kernel(eps, t), x0f, order - 1)
            out += [kj[k - 1] / k for k in range(1, order + 1)]
        return out

    def fn(eps, x):
        if isinstance(x, Jet):
            return compose_series(taylor(eps, x.c[0], x.order), x)
        if isinstance(x, mpmath.mpf):
            return mpmath.mpf(value(eps, float(x)))
        return value(eps, float(x))

    return SmoothNet(fn, taylor_fn=taylor, features=kernel.features, breakpoints=lambda e: _kernel_breaks(kernel, e), name="H")


class _SmoothEmbedding:
    """Moment expansion of ``f * kernel``:

        iota(f)^(j)(x) = sum_k c_k(b) (-1/b)**k / k! * f^(j+k)(x)

    with the truncated kernel moments ``c_k``; exact for polynomials and
    accurate to ``b**-(k_max+2)`` otherwise.
    """

    def __init__(self, f: Callable, kernel: ScaledMollifierNet, data: _KernelData, mode: str = "expansion"):
        self.f = f
        self.kernel = kernel
        self.data = data
        self.mode = mode

    def taylor(self, eps, x0, order):
        if self.mode == "quadrature":
            return self.quadrature_taylor(eps, x0, order)
        K = self.data.k_max
        a = J_.taylor_coefficients(self.f, float(x0), order + K)
        c = self.data.truncated_moments(eps)
        b, _ = self.kernel.scale(eps)
        out = []
        for j in range(order + 1):
            s = 0.0
            for k in range(K, -1, -2):
                if j + k > order + K:
                    continue
                s += c[k] * (-1.0 / b) ** k * math.comb(j + k, k) * float(a[j + k])
            out.append(s)
        return out

    def correction(self, eps, x0) -> float:
        """``iota(f)(x0) - f(x0)`` summed without adding ``f(x0)`` itself."""
        K = self.data.k_max
        a = J_.taylor_coefficients(self.f, float(x0), K)
        c = self.data.truncated_moments(eps)
        b, _ = self.kernel.scale(eps)
        s = (c[0] - 1.0) * float(a[0])
        for k in range(K, 1, -2):
            s += c[k] * b ** (-k) * float(a[k])
        return s

    def quadrature_taylor(self, eps, x0, order):
        r = self.kernel.support_radius(eps)
        x0 = float(x0)

        def integrand(y):
            return np.array([float(v) for v in J_.taylor_coefficients(self.f, x0 - y, order)]) * self.kernel(eps, y)

        pts = [p for p in self.kernel.features(eps) if -r < p < r]
        res, _ = integrate.quad_vec(integrand, -r, r, points=pts, epsabs=0.0, epsrel=1e-12)
        return list(res)

    def __call__(self, eps, x):
        if isinstance(x, Jet):
            return compose_series(self.taylor(eps, x.c[0], x.order), x)
        return self.taylor(eps, x, 0)[0]


class _CompactEmbedding:
    def __init__(self, T: CompactC0, kernel: ScaledMollifierNet):
        self.T = T
        self.kernel = kernel

    def taylor(self, eps, x0, order):
        x0 = float(x0)
        r = self.kernel.support_radius(eps)
        a, b = self.T.support
        lo, hi = max(a, x0 - r), min(b, x0 + r)
        if lo >= hi:
            return [0.0] * (order + 1)

        # integrate in the kernel variable t = x0 - y, which resolves the
        # spike at t = 0 far better than y does near x0
        if order == 0:
            def integrand(t):
                return np.array([float(self.kernel(eps, t)) * self.T(x0 - t)])
        else:
            def integrand(t):
                kj = J_.taylor_coefficients(lambda s: self.kernel(eps, s), t, order)
                return np.array([float(v) for v in kj]) * self.T(x0 - t)

        tlo, thi = x0 - hi, x0 - lo
        pts = [x0 - p for p in self.T.xs] + _kernel_breaks(self.kernel, eps)
        pts = sorted({p for p in pts if tlo < p < thi})
        res, _ = integrate.quad_vec(integrand, tlo, thi, points=pts or None, epsabs=0.0, epsrel=1e-12, limit=400)
        return list(res)

    def __call__(self, eps, x):
        if isinstance(x, Jet):
            return compose_series(self.taylor(eps, x.c[0], x.order), x)
        return self.taylor(eps, x, 0)[0]


def _shift(net: SmoothNet, r: int) -> SmoothNet:
    """The r-th derivative of a 1-D net."""

    def taylor(eps, x0, order):
        c = net.taylor(eps, x0, order + r)
        return [c[j + r] * math.factorial(j + r) / math.factorial(j) for j in range(order + 1)]

    def fn(eps, x):
        if isinstance(x, Jet):
            return compose_series(taylor(eps, x.c[0], x.order), x)
        return taylor(eps, x, 0)[0]

    return SmoothNet(fn, taylor_fn=taylor, features=net._features, breakpoints=net._breakpoints, name=f"d{r}{net.name}")


def default_b(gauge: Gauge = STANDARD, a: float = 1.0) -> GenNum:
    """``b = drho**-a``."""
    return GenNum(gauge, lambda e: gauge.rho_pow(e, -a), name=f"drho^-{a}")


def _check_b(b: GenNum):
    g = b.gauge
    for a in (1, 2, 3, 4, 5):
        if is_strictly_positive(b * g.drho(a)) is Trilean.TRUE:
            return
    raise ValueError("b must satisfy b >= drho**-a for some a in 1..5")


def _embed_net(T: DistributionSpec, kernel: ScaledMollifierNet, data: _KernelData, mode: str) -> SmoothNet:
    if isinstance(T, Delta):
        net = _delta_net(kernel)
        net.primitive = _heaviside_net(kernel, data)
        return net
    if isinstance(T, Heaviside):
        return _heaviside_net(kernel, data)
    if isinstance(T, SmoothFn):
        emb = _SmoothEmbedding(T.f, kernel, data, mode)
        net = SmoothNet(emb, taylor_fn=emb.taylor, name=f"iota({T.name})")
        net.embedding = emb
        return net
    if isinstance(T, CompactC0):
        emb = _CompactEmbedding(T, kernel)
        return SmoothNet(emb, taylor_fn=emb.taylor, breakpoints=lambda e: list(T.xs), name="iota(C0)")
    if isinstance(T, DerivativeOf):
        if T.order < 0:
            raise ValueError("derivative order must be nonnegative")
        inner = _embed_net(T.spec, kernel, data, mode)
        if T.order == 0:
            return inner
        net = _shift(inner, T.order)
        net.primitive = inner if T.order == 1 else _shift(inner, T.order - 1)
        return net
    if isinstance(T, LinearCombination):
        parts = [(float(c), _embed_net(S, kernel, data, mode)) for c, S in T.terms]

        def fn(eps, x):
            s = 0.0
            for c, n in parts:
                s = s + c * _jet_call(n, eps, x)
            return s

        def taylor(eps, x0, order):
            out = [0.0] * (order + 1)
            for c, n in parts:
                for k, v in enumerate(n.taylor(eps, x0, order)):
                    out[k] = out[k] + c * v
            return out

        net = SmoothNet(fn, taylor_fn=taylor, name="lincomb")
        if all(n.primitive is not None for _, n in parts):
            prims = [(c, n.primitive) for c, n in parts]
            net.primitive = SmoothNet(lambda e, x: sum(c * _jet_call(p, e, x) for c, p in prims), name="lincomb'")
        return net
    raise UnsupportedDistribution(f"cannot embed {type(T).__name__}")


def embed(
    T: DistributionSpec,
    b: Optional[GenNum] = None,
    kernel: Optional[ScaledMollifierNet] = None,
    gauge: Gauge = STANDARD,
    mode: str = "expansion",
    k_max: Optional[int] = None,
) -> GSF:
    """Embed ``T`` as the GSF ``x -> (T * mu_eps^b)(x)``.

    ``b`` defaults to ``1/drho``. Smooth functions use the moment expansion
    (``mode="expansion"``) or direct convolution quadrature
    (``mode="quadrature"``).
    """
    if kernel is None:
        if b is None:
            b = default_b(gauge)
        kernel = ScaledMollifierNet(b)
    b = kernel.b
    _check_b(b)
    k_max = k_max if k_max is not None else 2 * kernel.mollifier.J + 8
    data = _KernelData(kernel, k_max)
    net = _embed_net(T, kernel, data, mode)
    return GSF(net, gauge=b.gauge, name=net.name, meta={"kernel": kernel, "spec": T})


def embedding_correction(f: GSF, x) -> GenNum:
    """For an embedded smooth function, the net ``iota(f)(x) - f(x)`` computed
    from the kernel moments without forming the (absorbing) float sum."""
    emb = getattr(f.net, "embedding", None)
    if emb is None:
        raise TypeError("not an embedded smooth function")
    x = _as_point(x, f.gauge)
    return GenNum(x.gauge, lambda e: emb.correction(e, x.value(e)), name="iota(f)-f")


# ---------------------------------------------------------------------------
# moderateness audit
# ---------------------------------------------------------------------------


@dataclass
class AuditEntry:
    alpha: tuple
    estimate: Optional[OrderEstimate]
    note: str = ""

    @property
    def ok(self) -> bool:
        if self.estimate is None:
            return False
        return self.estimate.classification in (Classification.MODERATE, Classification.NEGLIGIBLE)

    def as_dict(self) -> dict:
        d = {"alpha": list(self.alpha), "ok": self.ok, "note": self.note}
        if self.estimate is not None:
            d.update(self.estimate.as_dict())
        else:
            d["classification"] = "NotModerate"
        return d


@dataclass
class AuditReport:
    entries: list
    verdict: bool
    lower_trust: bool = False

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "lower_trust": self.lower_trust, "entries": [e.as_dict() for e in self.entries]}


def _multi_indices(n: int, order: int):
    if n == 1:
        for k in range(order + 1):
            yield (k,)
        return
    def rec(prefix, left, remaining):
        if remaining == 1:
            yield prefix + (left,)
            return
        for a in range(left + 1):
            yield from rec(prefix + (a,), left - a, remaining - 1)
    for total in range(order + 1):
        yield from rec((), total, n)


def derivative_net(f: GSF, x: GenNum, alpha: tuple) -> GenNum:
    net = f.net
    if net.n_in == 1:
        k = alpha[0]
        return GenNum(x.gauge, lambda e: net.derivatives(e, x.value(e), k)[k], name=f"d{k}f")
    return GenNum(x.gauge, lambda e: net.partial(e, x.value(e), alpha), name=f"d{alpha}f")


def audit_moderateness(f: GSF, x, max_order: int = 2) -> AuditReport:
    """Order estimate of every partial derivative of order <= max_order at x."""
    x = _as_point(x, f.gauge)
    entries = []
    for alpha in _multi_indices(f.n_in, max_order):
        d = derivative_net(f, x, alpha)
        try:
            est = classify_order(d)
            entries.append(AuditEntry(alpha, est))
        except (NonFiniteSample, OverflowError):
            entries.append(AuditEntry(alpha, None, "overflow on the grid: grows faster than any power"))
    return AuditReport(entries, all(e.ok for e in entries), lower_trust=not f.net.exact)
