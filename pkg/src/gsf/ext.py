"""Real numbers stored as ``sign * exp(log_abs)``.

Hypersequences are probed at indices such as ``exp(rho**-5)`` that no float
can hold. :class:`ExtReal` keeps only the sign and the logarithm of the
magnitude, which is enough for the products, quotients, powers and logs used
by typical test sequences.
"""

from __future__ import annotations

import math


class ExtReal:
    __slots__ = ("sign", "log_abs")
    _gsf_ext = True

    def __init__(self, sign: int, log_abs: float):
        self.sign = 0 if sign == 0 else (1 if sign > 0 else -1)
        self.log_abs = -math.inf if self.sign == 0 else float(log_abs)

    @classmethod
    def from_float(cls, v: float) -> "ExtReal":
        if v == 0:
            return cls(0, -math.inf)
        return cls(1 if v > 0 else -1, math.log(abs(v)))

    @classmethod
    def exp_of(cls, t: float) -> "ExtReal":
        """The positive number ``e**t``."""
        return cls(1, t)

    def __float__(self):
        if self.sign == 0:
            return 0.0
        if self.log_abs > 709.78:
            return math.copysign(math.inf, self.sign)
        return self.sign * math.exp(self.log_abs)

    def __repr__(self):
        return f"ExtReal({self.sign:+d}, log={self.log_abs!r})"

    @staticmethod
    def _wrap(v) -> "ExtReal":
        return v if isinstance(v, ExtReal) else ExtReal.from_float(float(v))

    def __neg__(self):
        return ExtReal(-self.sign, self.log_abs)

    def __abs__(self):
        return ExtReal(abs(self.sign), self.log_abs)

    def __mul__(self, other):
        o = self._wrap(other)
        return ExtReal(self.sign * o.sign, self.log_abs + o.log_abs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._wrap(other)
        if o.sign == 0:
            raise ZeroDivisionError("ExtReal division by zero")
        return ExtReal(self.sign * o.sign, self.log_abs - o.log_abs)

    def __rtruediv__(self, other):
        return self._wrap(other) / self

    def __add__(self, other):
        o = self._wrap(other)
        if o.sign == 0:
            return self
        if self.sign == 0:
            return o
        big, small = (self, o) if self.log_abs >= o.log_abs else (o, self)
        d = small.log_abs - big.log_abs
        if big.sign == small.sign:
            return ExtReal(big.sign, big.log_abs + math.log1p(math.exp(d)))
        if d == 0:
            return ExtReal(0, 0.0)
        return ExtReal(big.sign, big.log_abs + math.log1p(-math.exp(d)))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) - self

    def __pow__(self, p):
        p = float(p)
        if self.sign < 0:
            if p != int(p):
                raise ValueError("fractional power of a negative ExtReal")
            sign = -1 if int(p) % 2 else 1
        else:
            sign = self.sign
        if self.sign == 0:
            return ExtReal(0, 0.0) if p > 0 else ExtReal(1, math.inf)
        return ExtReal(sign, p * self.log_abs)

    def _key(self):
        return (self.sign, self.sign * self.log_abs) if self.sign else (0, 0.0)

    def _cmp(self, other):
        o = self._wrap(other)
        a, b = self.sign * (1 if self.sign else 0), o.sign
        if a != b:
            return (a > b) - (a < b)
        if a == 0:
            return 0
        d = (self.log_abs > o.log_abs) - (self.log_abs < o.log_abs)
        return d * a

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.sign, self.log_abs))

    # elementary functions used through gsf.jet dispatch
    def _log(self, _=None):
        if self.sign <= 0:
            raise ValueError("log of a nonpositive ExtReal")
        return self.log_abs

    def _exp(self, _=None):
        v = float(self)
        return ExtReal(1, v)

    def _sqrt(self, _=None):
        return self ** 0.5

    def _sin(self, _=None):
        return math.sin(float(self))

    def _cos(self, _=None):
        return math.cos(float(self))


def to_float(v) -> float:
    return float(v)


def log_abs(v) -> float:
    """log|v| for floats and ExtReal values."""
    if isinstance(v, ExtReal):
        return v.log_abs
    v = abs(float(v))
    return -math.inf if v == 0 else math.log(v)
