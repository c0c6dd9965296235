"""The acceptance suite: thirteen end-to-end checks on the default grid.

Each check returns a :class:`CriterionResult`; :func:`run_all` prints one
pass/fail line per check. Random probes come from ``numpy.random`` with a
fixed seed, so runs are reproducible.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import jet as J_
from .calculus import antiderivative, derivative, derivative_gsf, incremental_ratio, integral, taylor_remainder
from .functions import Delta, Heaviside, SmoothFn, compose, default_b, embed, embedding_correction, gsf_from_function
from .gauge import STANDARD, Classification, GenNum, Trilean, classify_order, interleave, le
from .hyper import HyperSeq, hyperlimit
from .measure import measure
from .mollifier import default_mollifier
from .sets import Ball, Box, ConvergentSequence, FunctCompact, lebesgue_number

G = STANDARD


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] criterion {self.number:2d}: {self.title} ({self.seconds:.1f}s) {self.detail}"


def _negligible(x: GenNum) -> bool:
    return classify_order(x).classification is Classification.NEGLIGIBLE


def _b(e):
    return G.rho_pow(e, -1)


def criterion_1(**_) -> tuple:
    d = embed(Delta())
    worst = max(abs(float(d(0.0).value(e)) - _b(e)) / _b(e) for e in G.grid)
    return worst <= 1e-12, f"max relative deviation {worst:.3g}"


def criterion_2(**_) -> tuple:
    H = embed(Heaviside())
    est = classify_order(H(0.0) - 0.5)
    ok = est.classification is Classification.NEGLIGIBLE and est.slope >= 4
    return ok, f"{est.classification.value}, slope {est.slope}"


def criterion_3(**_) -> tuple:
    d = embed(Delta())
    b = default_b()
    worst = 0.0
    for k in (1, 2, 3):
        v = d(b.reciprocal() * k)
        worst = max(worst, max(abs(float(v.value(e))) / _b(e) for e in G.grid))
    return worst <= 1e-10, f"max |delta(k/b)|/b = {worst:.3g}"


def criterion_4(**_) -> tuple:
    d = embed(Delta())
    dd = compose(d, d)
    b = default_b()
    at0 = _negligible(dd(0.0))
    at1 = _negligible(dd(1.0) - b)
    v = dd(b.reciprocal())
    worst = max(abs(float(v.value(e)) - _b(e)) / _b(e) for e in G.grid)
    ok = at0 and at1 and worst <= 1e-8
    return ok, f"(dd)(0) negligible={at0}, (dd)(1)-b negligible={at1}, rel dev at 1/b {worst:.3g}"


def criterion_5(**_) -> tuple:
    H = embed(Heaviside())
    d = embed(Delta())
    b = default_b()
    probes = {"0": G.const(0.0), "1/(2b)": b.reciprocal() * 0.5, "0.3": G.const(0.3)}
    out = {}
    for name, x in probes.items():
        out[name] = _negligible(derivative(H, x) - d(x))
    return all(out.values()), json.dumps(out, sort_keys=True)


def criterion_6(**_) -> tuple:
    f = gsf_from_function(lambda s: 1 / s, name="1/s")
    worst = 0.0
    ok = True
    for q in (1, 2):
        upper = GenNum(G, lambda e, q=q: G.rho_pow(e, -q))
        I = integral(f, 1.0, upper)
        for e in G.grid:
            exact = -q * G.log_rho(e)
            dev = abs(float(I.value(e)) - exact)
            tol = max(I.error(e), 1e-12 * exact)
            worst = max(worst, dev / exact)
            ok = ok and dev <= tol
    return ok, f"max relative deviation {worst:.3g}"


def criterion_7(**_) -> tuple:
    d = embed(Delta())
    prim = _negligible(integral(d, -1.0, 1.0) - 1)
    quad = _negligible(integral(d, -1.0, 1.0, use_primitive=False) - 1)
    return prim and quad, f"primitive path negligible={prim}, quadrature path negligible={quad}"


def criterion_8(seed: int = 0, **_) -> tuple:
    rng = np.random.default_rng(seed)
    f = embed(SmoothFn(J_.sin, "sin"))
    probes = rng.uniform(-3.0, 3.0, 10)
    raw = corr = True
    for x in probes:
        raw = raw and _negligible(abs(f(float(x)) - GenNum(G, lambda e, x=x: math.sin(x))))
        corr = corr and _negligible(embedding_correction(f, float(x)))
    return raw and corr, f"raw difference negligible={raw}, correction net negligible={corr} at 10 probes"


def criterion_9(trace_dir: Optional[str] = None, **_) -> tuple:
    cases = {
        "unit_interval": (Box(0.0, 1.0), "Measurable", 1.0),
        "reciprocal_sequence": (ConvergentSequence.reciprocal(), "Measurable", 0.0),
        "reciprocal_log_sequence": (ConvergentSequence.reciprocal_log(), "NotMeasurable", None),
    }
    ok = True
    parts = []
    for name, (base, want, value) in cases.items():
        res = measure(FunctCompact.of(base, G), 12)
        good = res.status == want
        if good and value is not None:
            good = all(abs(float(res.value.value(e)) - value) <= 1e-12 for e in G.grid)
        ok = ok and good
        parts.append(f"{name}={res.status}")
        if trace_dir is not None:
            path = Path(trace_dir)
            path.mkdir(parents=True, exist_ok=True)
            (path / f"measure_{name}.json").write_text(json.dumps(res.as_dict(), sort_keys=True, indent=1) + "\n")
    return ok, ", ".join(parts)


def criterion_10(**_) -> tuple:
    from .gauge import Gauge

    loglog = lambda e: (1 / e) * math.log(1 / e)
    sigma2 = Gauge(
        rho=lambda e: 0.0,
        log_rho_fn=lambda e: -math.exp(loglog(e)) if loglog(e) < 700 else -math.inf,
        loglog_inv_fn=loglog,
        name="exp(-eps^(-1/eps))",
    )
    r1 = hyperlimit(HyperSeq(G, G, lambda e, n: 1 / n ** 2), 0.0, q_max=5)
    r2 = hyperlimit(HyperSeq(sigma2, G, lambda e, n: 1 / J_.log(n)), 0.0, q_max=5)
    r3 = hyperlimit(HyperSeq(G, G, lambda e, n: 1 / J_.log(n)), 0.0, q_max=5)
    ok = r1.verdict == "Confirmed" and r2.verdict == "Confirmed" and r3.verdict == "Refuted"
    return ok, f"1/n^2: {r1.verdict}; 1/log n (sigma two-gauge): {r2.verdict}; 1/log n (sigma=rho): {r3.verdict}"


def _rand_exact_net(rng) -> GenNum:
    c = Fraction(int(rng.integers(-50, 51)), int(rng.integers(1, 9)))
    a = int(rng.integers(-3, 4))
    return GenNum(G, lambda e, c=c, a=a: c * Fraction(e) ** a, name="exact")


def _ring_axioms(rng) -> bool:
    for _ in range(200):
        x, y, z = (_rand_exact_net(rng) for _ in range(3))
        checks = [
            (x + y, y + x),
            (x * y, y * x),
            ((x + y) + z, x + (y + z)),
            ((x * y) * z, x * (y * z)),
            (x * (y + z), x * y + x * z),
            (x + 0, x),
            (x * 1, x),
            (x - x, G.const(0)),
        ]
        for u, v in checks:
            if any(u.value(e) != v.value(e) for e in G.grid):
                return False
    return True


def _le_transitive(rng) -> bool:
    seen = 0
    for _ in range(300):
        nets = [GenNum(G, lambda e, c=float(rng.uniform(-2, 2)), a=int(rng.integers(-2, 3)): c * e ** a) for _ in range(3)]
        x, y, z = nets
        if le(x, y) is Trilean.TRUE and le(y, z) is Trilean.TRUE:
            seen += 1
            if le(x, z) is not Trilean.TRUE:
                return False
    return seen > 0


def _smooth_instance(rng):
    a, w, c, s = (float(v) for v in rng.uniform(-2, 2, 4))
    return gsf_from_function(lambda x: a * J_.sin(w * x) + c * x ** 3 + J_.exp(s * x) * 0.1, name="smooth")


def _fermat_reyes(rng) -> bool:
    for _ in range(50):
        f = _smooth_instance(rng)
        x = G.const(float(rng.uniform(-1, 1)))
        p = float(rng.uniform(0, 2))
        h = GenNum(G, lambda e, c=float(rng.uniform(-1, 1)), p=p: c * e ** p)
        r = incremental_ratio(f, x, h)
        for e in G.grid:
            lhs = float(h.value(e)) * float(r.value(e))
            rhs = float(f.net(e, x.value(e) + h.value(e))) - float(f.net(e, x.value(e)))
            if abs(lhs - rhs) > 1e-9:
                return False
    return True


def _fundamental(rng) -> bool:
    for _ in range(10):
        f = _smooth_instance(rng)
        a, bb = sorted(float(v) for v in rng.uniform(-1, 1, 2))
        xp = float(rng.uniform(a, bb))
        F = antiderivative(f, a)
        d1 = derivative(F, xp) - f(xp)
        I = integral(derivative_gsf(f), a, bb, use_primitive=False)
        d2 = I - (f(bb) - f(a))
        for e in G.grid[::4]:
            if abs(float(d1.value(e))) > 1e-8 or abs(float(d2.value(e))) > 1e-8:
                return False
    return True


def _taylor_slopes(rng) -> bool:
    for _ in range(8):
        n = int(rng.integers(0, 4))
        coeffs = [float(v) for v in rng.uniform(-1, 1, n + 2)]
        s = float(rng.uniform(0.5, 2))
        f = gsf_from_function(lambda x, c=coeffs, s=s: sum(ci * x ** i for i, ci in enumerate(c)) + J_.exp(-s * x * x), name="poly+gauss")
        a = float(rng.uniform(-1, 1))
        d = f.net.derivatives(1.0, a, n + 1)[n + 1]
        if abs(d) < 1e-3:
            continue
        R, _, est = taylor_remainder(f, a, G.drho(1), n)
        if est.classification is not Classification.MODERATE or abs(est.slope - (n + 1)) > 0.1:
            return False
    return True


def _moments() -> bool:
    mol = default_mollifier()
    res = mol.residuals()
    return all(abs(v) <= 1e-10 for v in res.values())


def criterion_11(seed: int = 0, **_) -> tuple:
    rng = np.random.default_rng(seed)
    parts = {
        "ring_axioms": _ring_axioms(rng),
        "le_transitivity": _le_transitive(rng),
        "fermat_reyes": _fermat_reyes(rng),
        "fundamental_theorem": _fundamental(rng),
        "taylor_slopes": _taylor_slopes(rng),
        "mollifier_moments": _moments(),
    }
    return all(parts.values()), json.dumps(parts, sort_keys=True)


def criterion_12(seed: int = 0, **_) -> tuple:
    rng = np.random.default_rng(seed)
    d = embed(Delta())
    b = default_b()
    fns = [
        gsf_from_function(J_.sin, name="sin"),
        gsf_from_function(J_.exp, name="exp"),
        gsf_from_function(lambda x: x ** 3 - 2 * x, name="cubic"),
        d,
    ]
    ok = True
    count = 0
    for i in range(20):
        f = fns[i % len(fns)]
        if f is d:
            x = b.reciprocal() * float(rng.uniform(-3, 3))
        else:
            x = G.const(float(rng.uniform(-2, 2)))
        sign = float(rng.choice([-1.0, 1.0]))
        noise = GenNum(G, lambda e, s=sign: s * G.rho_pow(e, 20))
        mask = int(rng.integers(2, 5))
        y = interleave(x + noise, x, lambda k, m=mask: k % m == 0)
        ok = ok and _negligible(f(y) - f(x))
        count += 1
    return ok, f"{count} pairs"


def criterion_13(**_) -> tuple:
    K = FunctCompact.of(Box(-1.0, 1.0), G)
    cover = [Box(-2.0, 0.1, open=True), Box(-0.1, 2.0, open=True)]
    s1, pos1 = lebesgue_number(cover, K)
    r = lambda e: 1 + math.exp(-1 / e)
    cover2 = [Ball(-1.0, r), Ball(1.0, r)]
    s2, pos2 = lebesgue_number(cover2, K)
    ok = pos1 is Trilean.TRUE and abs(float(s1.value(G.grid[-1])) - 0.05) < 1e-12 and pos2 is not Trilean.TRUE
    return ok, f"overlap 0.2: s={float(s1.value(G.grid[-1])):.6g} positive={pos1.value}; exp(-1/eps) overlap: positive={pos2.value}"


CRITERIA: list[tuple[int, str, Callable]] = [
    (1, "delta(0) = b", criterion_1),
    (2, "H(0) - 1/2 negligible", criterion_2),
    (3, "delta(k/b) = 0", criterion_3),
    (4, "delta o delta values", criterion_4),
    (5, "H' = delta at probes", criterion_5),
    (6, "improper integral of 1/s", criterion_6),
    (7, "unit mass of delta", criterion_7),
    (8, "smooth embedding fidelity", criterion_8),
    (9, "measurability trio", criterion_9),
    (10, "hyperlimit pair", criterion_10),
    (11, "property suites", criterion_11),
    (12, "representative independence", criterion_12),
    (13, "Lebesgue number", criterion_13),
]


def run_one(number: int, seed: int = 0, trace_dir: Optional[str] = None) -> CriterionResult:
    _, title, fn = CRITERIA[number - 1]
    t0 = time.perf_counter()
    try:
        passed, detail = fn(seed=seed, trace_dir=trace_dir)
    except Exception as exc:  # a crash is a failure of the criterion
        passed, detail = False, f"error: {type(exc).__name__}: {exc}"
    return CriterionResult(number, title, bool(passed), detail, time.perf_counter() - t0)


def run_all(seed: int = 0, trace_dir: Optional[str] = None, echo: Callable[[str], None] = print) -> list[CriterionResult]:
    results = []
    for number, _, _ in CRITERIA:
        res = run_one(number, seed, trace_dir)
        echo(res.line())
        results.append(res)
    return results
