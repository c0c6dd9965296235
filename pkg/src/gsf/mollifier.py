"""A concrete even mollifier with finitely many vanishing moments and
integer zeros, the cutoff bump ``chi`` and the scaled kernel net.

The mollifier has the form

    mu(u) = exp(-u**2/2) * Z(u**2) * Q(u**2),   Z(y) = prod_{k=1..K} (1 - y/k**2)

so the integer zeros are built in (and exact in floating point), while the
polynomial ``Q`` of degree ``M - K`` is the minimum-L2-norm solution of the
linear conditions ``mu(0) = 1``, ``int mu = 1`` and ``int u**(2j) mu = 0``
for ``j = 1..J``. Every constraint integral is a Gaussian moment, evaluated
in closed form with mpmath at high precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np

from . import jet as J_
from .jet import Jet, real_part

DEFAULT_J = 7
DEFAULT_K = 5
P_MAX = 40
_DPS = 100
_CUT_Y = 1500.0  # exp(-y/2) underflows beyond this


class SingularSystem(ValueError):
    pass


class OrderTooHigh(ValueError):
    pass


def _zero_poly(K: int) -> list[Fraction]:
    z = [Fraction(1)]
    for k in range(1, K + 1):
        nz = [Fraction(0)] * (len(z) + 1)
        for i, c in enumerate(z):
            nz[i] += c
            nz[i + 1] -= c / (k * k)
        z = nz
    return z


def _gauss_moment(n: int):
    """int u**(2n) exp(-u**2/2) du over the real line."""
    return mpmath.sqrt(2 * mpmath.pi) * mpmath.fac2(2 * n - 1)


def _gram_moment(n: int):
    """int u**(2n) exp(-u**2) du over the real line."""
    return mpmath.gamma(n + mpmath.mpf(1) / 2)


def default_M(J: int, K: int) -> int:
    return 2 + J + K + 4


@dataclass(frozen=True)
class Mollifier1D:
    J: int
    K: int
    M: int
    q_mp: tuple  # coefficients of Q as mpf, low degree first
    p_mp: tuple = field(repr=False, default=())  # coefficients of Z*Q
    q: tuple = field(repr=False, default=())
    p: tuple = field(repr=False, default=())

    # -- evaluation --------------------------------------------------------
    def __call__(self, u):
        if isinstance(u, mpmath.mpf):
            return self._eval_mp(u)
        if isinstance(u, np.ndarray):
            return self._eval_array(u)
        if isinstance(u, Jet):
            return self._eval_generic(u)
        return self._eval_float(float(u))

    def _eval_float(self, u: float) -> float:
        y = u * u
        if y > _CUT_Y:
            return 0.0
        z = 1.0
        for k in range(1, self.K + 1):
            z *= 1.0 - y / (k * k)
        s = 0.0
        for c in reversed(self.q):
            s = s * y + c
        return math.exp(-0.5 * y) * z * s

    def _eval_array(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        y = u * u
        ys = np.minimum(y, _CUT_Y)
        z = np.ones_like(ys)
        for k in range(1, self.K + 1):
            z = z * (1.0 - ys / (k * k))
        s = np.zeros_like(ys)
        for c in reversed(self.q):
            s = s * ys + c
        out = np.exp(-0.5 * ys) * z * s
        return np.where(y > _CUT_Y, 0.0, out)

    def _eval_mp(self, u):
        y = u * u
        z = mpmath.mpf(1)
        for k in range(1, self.K + 1):
            z *= 1 - y / (k * k)
        s = mpmath.mpf(0)
        for c in reversed(self.q_mp):
            s = s * y + c
        return mpmath.exp(-y / 2) * z * s

    def _eval_generic(self, u: Jet):
        y = u * u
        if float(real_part(y)) > _CUT_Y:
            return u * 0.0
        z = 1.0
        for k in range(1, self.K + 1):
            z = (1.0 - y / (k * k)) * z
        mp_mode = isinstance(real_part(u), mpmath.mpf)
        coeffs = self.q_mp if mp_mode else self.q
        s = 0.0
        for c in reversed(coeffs):
            s = s * y + c
        return J_.exp(-0.5 * y) * z * s

    def derivatives(self, u: float, order: int) -> list:
        if order > P_MAX:
            raise OrderTooHigh(f"derivative order {order} exceeds {P_MAX}")
        return J_.derivatives(self, u, order)

    # -- exact integrals -------------------------------------------------------
    def moment(self, k: int):
        """int u**k mu(u) du, exact (mpf)."""
        if k % 2:
            return mpmath.mpf(0)
        return 2 * self.upper_moment(k, 0)

    def upper_moment(self, k: int, s):
        """int_s^inf u**k mu(u) du for even k and s >= 0 (mpf)."""
        return _upper_moment(self, k, mpmath.mpf(s))

    def tail_mass(self, s) -> float:
        """G(s) = int_s^inf mu as a float, for any real s."""
        if s < 0:
            return float(1 - self.upper_moment(0, -s))
        return float(self.upper_moment(0, s))

    def residuals(self) -> dict:
        out = {
            "mu0_minus_1": float(self._eval_mp(mpmath.mpf(0)) - 1),
            "mass_minus_1": float(self.moment(0) - 1),
        }
        for j in range(1, self.J + 1):
            out[f"moment_{2 * j}"] = float(self.moment(2 * j))
        for k in range(1, self.K + 1):
            out[f"mu_at_{k}"] = float(self._eval_mp(mpmath.mpf(k)))
            out[f"mu_at_{k}_float"] = self._eval_float(float(k))
        return out

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "J": self.J,
            "K": self.K,
            "M": self.M,
            "basis": "exp(-u^2/2) * prod_k (1 - u^2/k^2) * u^(2m)",
            "q": [mpmath.nstr(c, 40) for c in self.q_mp],
            "q_float": list(self.q),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, data: dict) -> "Mollifier1D":
        with mpmath.workdps(_DPS):
            q = tuple(mpmath.mpf(c) for c in data["q"])
        return _assemble(int(data["J"]), int(data["K"]), int(data["M"]), q)


@lru_cache(maxsize=4096)
def _upper_moment(mol: Mollifier1D, k: int, s) -> mpmath.mpf:
    with mpmath.workdps(_DPS):
        x = s * s / 2
        total = mpmath.mpf(0)
        for i, c in enumerate(mol.p_mp):
            n = k + 2 * i
            a = mpmath.mpf(n + 1) / 2
            total += c * mpmath.power(2, a - 1) * mpmath.gammainc(a, x)
        return +total


def _assemble(J: int, K: int, M: int, q_mp: tuple) -> Mollifier1D:
    z = _zero_poly(K)
    with mpmath.workdps(_DPS):
        p = [mpmath.mpf(0)] * (len(z) + len(q_mp) - 1)
        for i, zi in enumerate(z):
            zi_mp = mpmath.mpf(zi.numerator) / zi.denominator
            for j, qj in enumerate(q_mp):
                p[i + j] += zi_mp * qj
    return Mollifier1D(
        J=J,
        K=K,
        M=M,
        q_mp=tuple(q_mp),
        p_mp=tuple(p),
        q=tuple(float(c) for c in q_mp),
        p=tuple(float(c) for c in p),
    )


def build_mollifier(J: int = DEFAULT_J, K: int = DEFAULT_K, M: Optional[int] = None) -> Mollifier1D:
    """Solve for the minimum-norm mollifier with ``J`` vanishing even moments
    and zeros at ``1..K``. ``M`` is the polynomial degree in ``u**2``."""
    if J < 0 or K < 0:
        raise ValueError("J and K must be nonnegative")
    if M is None:
        M = default_M(J, K)
    return _build_cached(J, K, M)


@lru_cache(maxsize=32)
def _build_cached(J: int, K: int, M: int) -> Mollifier1D:
    D = M - K
    if D < 0 or D + 1 < J + 2:
        raise SingularSystem(f"{J + 2} conditions cannot be met with degree M={M} after {K} zeros")
    z = _zero_poly(K)
    with mpmath.workdps(_DPS):
        zmp = [mpmath.mpf(c.numerator) / c.denominator for c in z]
        nb = D + 1
        A = mpmath.matrix(J + 2, nb)
        for m in range(nb):
            A[0, m] = 1 if m == 0 else 0
            for j in range(J + 1):
                A[j + 1, m] = sum(c * _gauss_moment(i + m + j) for i, c in enumerate(zmp))
        rhs = mpmath.matrix(J + 2, 1)
        rhs[0] = 1
        rhs[1] = 1
        G = mpmath.matrix(nb, nb)
        for a in range(nb):
            for c in range(a, nb):
                v = sum(
                    x * y * _gram_moment(i + j + a + c)
                    for i, x in enumerate(zmp)
                    for j, y in enumerate(zmp)
                )
                G[a, c] = v
                G[c, a] = v
        # rank check on the row-normalized constraint matrix
        An = A.copy()
        for r in range(A.rows):
            nr = mpmath.norm(A[r, :])
            for cidx in range(A.cols):
                An[r, cidx] = A[r, cidx] / nr
        sv = mpmath.svd_r(An, compute_uv=False)
        if min(sv) < mpmath.mpf(10) ** (-60):
            raise SingularSystem(f"constraint matrix is rank deficient for J={J}, K={K}, M={M}")
        try:
            Gi = mpmath.inverse(G)
            Gi_At = Gi * A.T
            S = A * Gi_At
            lam = mpmath.lu_solve(S, rhs)
        except ZeroDivisionError as exc:
            raise SingularSystem(str(exc)) from exc
        q = Gi_At * lam
        q_mp = tuple(+q[i] for i in range(nb))
    return _assemble(J, K, M, q_mp)


_DEFAULT: Optional[Mollifier1D] = None


def default_mollifier() -> Mollifier1D:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = build_mollifier()
    return _DEFAULT


# ---------------------------------------------------------------------------
# cutoff bump
# ---------------------------------------------------------------------------


def _psi(t):
    """exp(-1/t) for t > 0, else 0."""
    if real_part(t) <= 0:
        return t * 0.0
    return J_.exp(-1.0 / t)


def chi(x):
    """Smooth bump: 1 on [-1, 1], 0 outside (-2, 2), monotone in between."""
    if isinstance(x, np.ndarray):
        return np.array([chi(float(v)) for v in x.ravel()]).reshape(x.shape)
    a = abs(x)
    ra = real_part(a)
    if ra <= 1:
        return x * 0.0 + 1.0 if isinstance(x, Jet) else (mpmath.mpf(1) if isinstance(x, mpmath.mpf) else 1.0)
    if ra >= 2:
        return x * 0.0 if isinstance(x, Jet) else (mpmath.mpf(0) if isinstance(x, mpmath.mpf) else 0.0)
    t = 2.0 - a
    f0 = _psi(t)
    f1 = _psi(1.0 - t)
    return f0 / (f0 + f1)


# ---------------------------------------------------------------------------
# scaled kernel net
# ---------------------------------------------------------------------------


class ScaledMollifierNet:
    """``(eps, x) -> b_eps * mu(b_eps * x) * chi(x * |log b_eps|)``.

    ``b`` is a GenNum (infinite and positive). Inputs may be floats, mpf
    values or jets; mpf inputs switch the whole evaluation to mpmath.
    """

    def __init__(self, b, mollifier: Optional[Mollifier1D] = None, p_max: int = P_MAX):
        self.b = b
        self.mollifier = mollifier or default_mollifier()
        self.p_max = p_max

    @property
    def gauge(self):
        return self.b.gauge

    def scale(self, eps, mp: bool = False):
        b = self.b.value(eps)
        if mp:
            b = mpmath.mpf(b)
            return b, abs(mpmath.log(b))
        b = float(b)
        return b, abs(math.log(b))

    def support_radius(self, eps) -> float:
        return 2.0 / self.scale(eps)[1]

    def __call__(self, eps, x):
        mp = isinstance(real_part(x), mpmath.mpf)
        b, L = self.scale(eps, mp)
        if real_part(abs(x)) * L >= 2:
            return x * 0.0 if isinstance(x, Jet) else x * 0
        return b * self.mollifier(b * x) * chi(x * L)

    def derivatives(self, eps, x, order: int) -> list:
        if order > self.p_max:
            raise OrderTooHigh(f"derivative order {order} exceeds p_max={self.p_max}")
        return J_.derivatives(lambda t: self(eps, t), x, order)

    def features(self, eps) -> list[float]:
        """Points where the slice has structure: 0, the zeros k/b, cutoff joins."""
        b, L = self.scale(eps)
        pts = [0.0]
        for k in range(1, self.mollifier.K + 1):
            pts += [k / b, -k / b]
        pts += [1 / L, -1 / L, 2 / L, -2 / L]
        return pts


def scaled_eval(net: ScaledMollifierNet, eps, x, deriv_order: int = 0):
    """Exact value of the ``deriv_order``-th derivative of the kernel slice at ``x``."""
    if deriv_order > net.p_max:
        raise OrderTooHigh(f"derivative order {deriv_order} exceeds p_max={net.p_max}")
    if deriv_order == 0:
        return net(eps, x)
    return net.derivatives(eps, x, deriv_order)[deriv_order]


def mu_nd(mollifier: Mollifier1D, x: np.ndarray):
    """Radial mollifier ``c_n * mu(|x|**n)`` for n = 1 or 2."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    n = x.shape[-1]
    r = np.linalg.norm(x, axis=-1)
    if n == 1:
        return mollifier(r)
    if n == 2:
        return (2.0 / math.pi) * mollifier(r ** 2)
    raise NotImplementedError("radial mollifiers are provided for n <= 2 only")
