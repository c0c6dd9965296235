"""Independent reference computations used as frozen expectations.

None of these go through the library's own evaluators beyond the mollifier
profile itself: integrals use Gauss-Hermite nodes or mpmath quadrature
on the explicit kernel formula, slopes use closed-form log ratios.
"""

import math
from fractions import Fraction

import mpmath
import numpy as np
from numpy.polynomial.hermite_e import hermegauss


def gauss_hermite_mass(mu, nodes: int = 64) -> float:
    """``int mu`` for ``mu(u) = exp(-u^2/2) * p(u)`` with ``p`` a polynomial."""
    u, w = hermegauss(nodes)
    return float(sum(wi * mu(float(ui)) * math.exp(ui * ui / 2) for ui, wi in zip(u, w)))


def gauss_hermite_moment(mu, k: int, nodes: int = 64) -> float:
    u, w = hermegauss(nodes)
    return float(sum(wi * ui ** k * mu(float(ui)) * math.exp(ui * ui / 2) for ui, wi in zip(u, w)))


def chi_ref(x: float) -> float:
    """Standard smooth step: 1 on [-1, 1], 0 outside (-2, 2)."""
    t = abs(x)
    if t <= 1:
        return 1.0
    if t >= 2:
        return 0.0
    f = lambda s: math.exp(-1 / s) if s > 0 else 0.0
    s = 2 - t
    return f(s) / (f(s) + f(1 - s))


def kernel_ref(mu, eps: float, x: float) -> float:
    """``b mu(b x) chi(x |log b|)`` with ``b = 1/eps``."""
    b = 1 / eps
    return b * mu(b * x) * chi_ref(x * abs(math.log(b)))


def heaviside_ref(mu, eps: float, x: float) -> float:
    """``int_{-inf}^{x} mu_eps^b`` by mpmath quadrature of the kernel."""
    b = 1 / eps
    r = 2 / abs(math.log(b))
    if x <= -r:
        return 0.0
    hi = min(x, r)
    pts = sorted({-r, hi} | {k / b for k in range(-60, 61) if -r < k / b < hi})
    val = mpmath.quad(lambda t: kernel_ref(mu, eps, float(t)), pts)
    return float(val)


def smooth_embedding_ref(f, mu, eps: float, x: float) -> float:
    """``(f * mu_eps^b)(x)`` by mpmath quadrature."""
    b = 1 / eps
    r = 2 / abs(math.log(b))
    pts = sorted({-r, r} | {k / b for k in range(-60, 61) if -r < k / b < r})
    return float(mpmath.quad(lambda y: f(x - float(y)) * kernel_ref(mu, eps, float(y)), pts))


def loglog_slope(values, grid, rho=lambda e: e) -> float:
    """Least-squares slope of ``log|x|`` against ``log rho`` (closed form)."""
    X = np.array([math.log(rho(e)) for e in grid])
    Y = np.array([math.log(abs(v)) for v in values])
    X = X - X.mean()
    return float((X * (Y - Y.mean())).sum() / (X * X).sum())


def hyper_threshold_power(q: int, k: int, eps: float) -> int:
    """Least ``M`` with ``1/n^k < eps^q`` for all ``n >= M``, in exact rationals."""
    bound = 1 / Fraction(eps) ** q
    lo, hi = 1, 2
    while Fraction(hi) ** k <= bound:
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if Fraction(mid) ** k > bound:
            hi = mid
        else:
            lo = mid
    return hi if Fraction(lo) ** k <= bound else lo
