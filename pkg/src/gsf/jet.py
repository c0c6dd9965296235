"""Truncated Taylor series ("jets") for exact forward-mode derivatives.

A :class:`Jet` holds the Taylor coefficients ``c[k] = f^(k)(x0) / k!`` of a
quantity up to a fixed order. Coefficients may be floats, ``mpmath.mpf``
values or other jets carrying a different ``tag``; jets with distinct tags
nest, which gives mixed partial derivatives in several variables.

The elementary functions at the bottom of the module dispatch on the argument
type, so a net written with them can be evaluated on floats, on high-precision
numbers, on jets or on :class:`gsf.ext.ExtReal` log-magnitude numbers.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import count
from typing import Callable, Sequence

import mpmath
import numpy as np

_tags = count(1)


def new_tag() -> int:
    return next(_tags)


class Jet:
    __slots__ = ("c", "tag")

    def __init__(self, coeffs: Sequence, tag: int = 0):
        self.c = tuple(coeffs)
        self.tag = tag

    @classmethod
    def variable(cls, x0, order: int, tag: int = 0) -> "Jet":
        coeffs = [x0] + [0.0] * order
        if order >= 1:
            coeffs[1] = 1.0
        return cls(coeffs, tag)

    @classmethod
    def constant(cls, value, order: int, tag: int = 0) -> "Jet":
        return cls([value] + [0.0] * order, tag)

    @property
    def order(self) -> int:
        return len(self.c) - 1

    @property
    def value(self):
        return self.c[0]

    def derivatives(self) -> list:
        """Return ``[f, f', f'', ...]`` (unscaled derivatives)."""
        return [ck * math.factorial(k) for k, ck in enumerate(self.c)]

    def __repr__(self):
        return f"Jet({list(self.c)!r}, tag={self.tag})"

    # -- promotion -----------------------------------------------------------
    def _coerce(self, other):
        """Return ``(a, b)`` jets sharing this jet's tag, or None if ``other``
        must be treated as the outer jet."""
        if isinstance(other, Jet):
            if other.tag == self.tag:
                if other.order != self.order:
                    n = min(self.order, other.order)
                    return Jet(self.c[: n + 1], self.tag), Jet(other.c[: n + 1], self.tag)
                return self, other
            if other.tag < self.tag:
                return None
        return self, Jet.constant(other, self.order, self.tag)

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return other.__radd__(self)
        a, b = pair
        return Jet([x + y for x, y in zip(a.c, b.c)], a.tag)

    def __radd__(self, other):
        if isinstance(other, Jet) and other.tag == self.tag:
            return other.__add__(self)
        return Jet([self.c[0] + other] + list(self.c[1:]), self.tag)

    def __neg__(self):
        return Jet([-x for x in self.c], self.tag)

    def __pos__(self):
        return self

    def __sub__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return other.__rsub__(self)
        a, b = pair
        return Jet([x - y for x, y in zip(a.c, b.c)], a.tag)

    def __rsub__(self, other):
        return (-self).__radd__(other)

    def __mul__(self, other):
        if not isinstance(other, Jet) or other.tag > self.tag:
            return Jet([x * other for x in self.c], self.tag)
        if other.tag < self.tag:
            return other.__rmul__(self)
        a, b = self._coerce(other)
        n = a.order
        out = []
        for k in range(n + 1):
            s = a.c[0] * b.c[k]
            for j in range(1, k + 1):
                s = s + a.c[j] * b.c[k - j]
            out.append(s)
        return Jet(out, a.tag)

    def __rmul__(self, other):
        return Jet([other * x for x in self.c], self.tag)

    def __truediv__(self, other):
        if not isinstance(other, Jet) or other.tag > self.tag:
            return Jet([x / other for x in self.c], self.tag)
        if other.tag < self.tag:
            return other.__rtruediv__(self)
        return self * reciprocal(other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        if isinstance(p, int) and p >= 0:
            out = Jet.constant(1.0, self.order, self.tag)
            base = self
            while p:
                if p & 1:
                    out = out * base
                base = base * base
                p >>= 1
            return out
        return power(self, p)

    def __rpow__(self, base):
        return exp(self * log(base))

    def __abs__(self):
        return -self if _real(self.c[0]) < 0 else self

    # comparisons use the value only; branch selection in nets relies on this
    def __lt__(self, other):
        return _real(self) < _real(other)

    def __le__(self, other):
        return _real(self) <= _real(other)

    def __gt__(self, other):
        return _real(self) > _real(other)

    def __ge__(self, other):
        return _real(self) >= _real(other)

    def __float__(self):
        return float(_real(self))


def _real(x):
    while isinstance(x, Jet):
        x = x.c[0]
    return x


def real_part(x):
    """Strip all jet levels and return the underlying scalar value."""
    return _real(x)


def _scalar_fn(name: str):
    return _SCALAR[name]


def _dispatch(x, name: str):
    if isinstance(x, mpmath.mpf):
        return getattr(mpmath, name)
    if isinstance(x, np.ndarray):
        return getattr(np, name)
    ext = getattr(x, "_gsf_ext", None)
    if ext is not None:
        return getattr(x, "_" + name)
    return _SCALAR[name]


def _float_log(x):
    if isinstance(x, Fraction):
        return math.log(x.numerator) - math.log(x.denominator)
    return math.log(x)


_SCALAR = {
    "exp": math.exp,
    "log": _float_log,
    "sin": math.sin,
    "cos": math.cos,
    "sqrt": math.sqrt,
}


def reciprocal(u: Jet) -> Jet:
    n = u.order
    w = [None] * (n + 1)
    w[0] = 1.0 / u.c[0]
    for k in range(1, n + 1):
        s = u.c[1] * w[k - 1]
        for j in range(2, k + 1):
            s = s + u.c[j] * w[k - j]
        w[k] = -s * w[0]
    return Jet(w, u.tag)


def exp(x):
    if isinstance(x, Jet):
        n = x.order
        w = [None] * (n + 1)
        w[0] = exp(x.c[0])
        for k in range(1, n + 1):
            s = (1.0 * x.c[1]) * w[k - 1]
            for j in range(2, k + 1):
                s = s + (1.0 * j) * x.c[j] * w[k - j]
            w[k] = s / k
        return Jet(w, x.tag)
    return _dispatch(x, "exp")(x)


def log(x):
    if isinstance(x, Jet):
        n = x.order
        w = [None] * (n + 1)
        w[0] = log(x.c[0])
        for k in range(1, n + 1):
            s = 1.0 * k * x.c[k]
            for j in range(1, k):
                s = s - (1.0 * j) * w[j] * x.c[k - j]
            w[k] = s / (k * x.c[0])
        return Jet(w, x.tag)
    return _dispatch(x, "log")(x)


def _sincos(x: Jet):
    n = x.order
    s = [None] * (n + 1)
    c = [None] * (n + 1)
    s[0], c[0] = sin(x.c[0]), cos(x.c[0])
    for k in range(1, n + 1):
        ss = 0.0
        cc = 0.0
        for j in range(1, k + 1):
            ss = ss + j * x.c[j] * c[k - j]
            cc = cc - j * x.c[j] * s[k - j]
        s[k] = ss / k
        c[k] = cc / k
    return Jet(s, x.tag), Jet(c, x.tag)


def sin(x):
    if isinstance(x, Jet):
        return _sincos(x)[0]
    return _dispatch(x, "sin")(x)


def cos(x):
    if isinstance(x, Jet):
        return _sincos(x)[1]
    return _dispatch(x, "cos")(x)


def power(x, p):
    """``x**p`` for real ``p``; jets use the standard power recurrence."""
    if isinstance(x, Jet):
        if isinstance(p, Jet):
            return exp(p * log(x))
        n = x.order
        w = [None] * (n + 1)
        w[0] = power(x.c[0], p)
        for k in range(1, n + 1):
            s = 0.0
            for j in range(1, k + 1):
                s = s + (p * j - (k - j)) * x.c[j] * w[k - j]
            w[k] = s / (k * x.c[0])
        return Jet(w, x.tag)
    if getattr(x, "_gsf_ext", None) is not None:
        return x ** p
    if isinstance(x, mpmath.mpf) or isinstance(p, mpmath.mpf):
        return mpmath.power(x, p)
    return x ** p


def sqrt(x):
    if isinstance(x, Jet):
        return power(x, 0.5)
    return _dispatch(x, "sqrt")(x)


def fabs(x):
    return abs(x)


def compose_series(outer: Sequence, inner: Jet) -> Jet:
    """Compose Taylor coefficients ``outer`` (taken at ``inner.value``) with
    the jet ``inner``: the series form of Faa di Bruno's formula."""
    n = inner.order
    du = Jet([0.0] + list(inner.c[1:]), inner.tag)
    coeffs = list(outer[: n + 1]) + [0.0] * max(0, n + 1 - len(outer))
    w = Jet.constant(coeffs[n], n, inner.tag)
    for j in range(n - 1, -1, -1):
        w = w * du + coeffs[j]
    return w


def lift(taylor: Callable[[float, int], Sequence]) -> Callable:
    """Turn ``taylor(x0, order)`` (Taylor coefficients of a scalar function)
    into a callable accepting floats and single-level jets."""

    def fn(x):
        if isinstance(x, Jet):
            if isinstance(x.c[0], Jet):
                raise NotImplementedError("nested jets are not supported by lifted functions")
            return compose_series(taylor(x.c[0], x.order), x)
        return taylor(x, 0)[0]

    fn.taylor = taylor
    return fn


def taylor_coefficients(f: Callable, x0, order: int) -> list:
    """Taylor coefficients of ``f`` at ``x0`` obtained by jet evaluation."""
    out = f(Jet.variable(x0, order))
    if isinstance(out, Jet):
        return list(out.c) + [0.0] * (order - out.order)
    return [out] + [0.0] * order


def derivatives(f: Callable, x0, order: int) -> list:
    """``[f(x0), f'(x0), ..., f^(order)(x0)]`` via jets."""
    return [ck * math.factorial(k) for k, ck in enumerate(taylor_coefficients(f, x0, order))]
