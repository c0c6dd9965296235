"""Command-line interface ``gsf``.

Every subcommand emits data only: JSON (UTF-8, sorted keys, validated
against the schemas shipped in ``gsf/schemas``) or CSV (header row, comma
separator, LF line endings, shortest round-trip float text).

Exit codes: 0 success, 1 computation-level failure (a verdict differing from
``--expect``, a failed self test, a solver that cannot proceed), 2 usage
error (bad flags, unparsable expressions, invalid configuration).
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields
from importlib import resources
from typing import Optional

import jsonschema

from . import expr as E
from .gauge import Gauge, GenNum, classify_order

PROG = "gsf"


class UsageError(Exception):
    pass


class VerdictFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass
class RunConfig:
    gauge: str = "eps"
    eps0: float = 1.0
    theta: float = 0.5
    kmin: int = 4
    kmax: int = 48
    qmax: int = 15
    nmax: int = 15
    mmax: int = 12
    quad_tol: float = 1e-13
    format: str = ""  # empty: the subcommand default
    seed: int = 0
    threads: int = 1

    def validate(self):
        if self.kmax - self.kmin + 1 < 16:
            raise UsageError("the grid needs at least 16 points (kmax - kmin + 1 >= 16)")
        for name in ("qmax", "nmax", "mmax", "threads"):
            if getattr(self, name) <= 0:
                raise UsageError(f"{name} must be positive")
        if not self.quad_tol > 0 or not self.eps0 > 0 or not 0 < self.theta < 1:
            raise UsageError("quad_tol and eps0 must be positive and theta in (0, 1)")
        if self.format not in ("", "json", "csv"):
            raise UsageError("format must be json or csv")

    def output_format(self, default: str = "json") -> str:
        return self.format or default

    def make_gauge(self) -> Gauge:
        grid = dict(k_min=self.kmin, k_max=self.kmax, eps0=self.eps0, theta=self.theta, q_max=self.qmax, n_max=self.nmax)
        if self.gauge.strip() == "eps":
            return Gauge(**grid)
        return E.gauge_from_expr(self.gauge, **grid)


def read_config_file(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; values keep TOML-like
    quoting optional."""
    out = {}
    names = {f.name: f.type for f in fields(RunConfig)}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in names:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
                value = value[1:-1]
            out[key] = value
    return out


def _coerce(cfg: RunConfig, key: str, value):
    typ = type(getattr(RunConfig(), key))
    try:
        return typ(value)
    except (TypeError, ValueError):
        raise UsageError(f"bad value for {key}: {value!r}") from None


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    path = getattr(args, "config", None) or os.environ.get("GSF_CONFIG")
    if path:
        try:
            for k, v in read_config_file(path).items():
                setattr(cfg, k, _coerce(cfg, k, v))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            setattr(cfg, f.name, _coerce(cfg, f.name, v))
    cfg.validate()
    return cfg


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _clean(v):
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, dict):
        return {str(k): _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if hasattr(v, "__float__") and not isinstance(v, (int, bool)):
        return _clean(float(v))
    return v


def _schema(name: str) -> dict:
    text = resources.files("gsf").joinpath("schemas", f"{name}.json").read_text(encoding="utf-8")
    return json.loads(text)


def emit_json(obj: dict, schema: str, out) -> None:
    obj = _clean(obj)
    jsonschema.validate(obj, _schema(schema))
    out.write(json.dumps(obj, sort_keys=True, ensure_ascii=False) + "\n")


def _fmt(v) -> str:
    if isinstance(v, int) and not isinstance(v, bool):
        return str(v)
    return repr(float(v))


def emit_csv(header: list, rows, out) -> None:
    out.write(",".join(header) + "\n")
    for row in rows:
        out.write(",".join(_fmt(v) for v in row) + "\n")


def _samples(x: GenNum, gauge: Gauge) -> list:
    return [float(x.value(e)) for e in gauge.grid]


def _prefetch(nets, gauge: Gauge, threads: int) -> None:
    """Fill the sample caches, optionally in parallel."""
    if threads <= 1:
        return
    with ThreadPoolExecutor(max_workers=threads) as pool:
        jobs = [pool.submit(n.value, e) for n in nets for e in gauge.grid]
        for j in jobs:
            j.result()


def _number_report(x: GenNum, gauge: Gauge, cfg: RunConfig, extra: Optional[dict] = None, log_corrected: bool = False) -> dict:
    _prefetch([x], gauge, cfg.threads)
    est = classify_order(x, log_corrected=log_corrected)
    rep = {
        "grid": [float(e) for e in gauge.grid],
        "value_samples": _samples(x, gauge),
        "order_estimate": est.as_dict(),
    }
    if extra:
        rep.update(extra)
    return rep


def _samples_csv(nets: dict, gauge: Gauge, out):
    header = ["k", "eps"] + list(nets)
    rows = []
    for k, e in zip(gauge.indices, gauge.grid):
        rows.append([k, e] + [float(n.value(e)) for n in nets.values()])
    emit_csv(header, rows, out)


# ---------------------------------------------------------------------------
# resolving functions and numbers
# ---------------------------------------------------------------------------


def resolve_gsf(spec: str, gauge: Gauge, b_exponent: float = 1.0):
    """``delta``, ``heaviside``, ``smooth:<expr in x>`` or a net expression.

    Embeddings use ``b = drho**-b_exponent``."""
    from .functions import Delta, Heaviside, SmoothFn, default_b, embed

    if not b_exponent > 0:
        raise UsageError("--b-exponent must be positive")
    b = default_b(gauge, b_exponent)
    s = spec.strip()
    if s == "delta":
        return embed(Delta(), b=b, gauge=gauge)
    if s in ("heaviside", "H"):
        return embed(Heaviside(), b=b, gauge=gauge)
    if s.startswith("smooth:"):
        ast = E.parse(s[len("smooth:"):], "net")
        if E.free_variables(ast) - {"x", "x1"}:
            raise UsageError("a smooth:<expr> function may only depend on x")
        return embed(SmoothFn(lambda x: E.eval_ast(ast, {"x": x, "x1": x}), s), b=b, gauge=gauge)
    return E.gsf_from_expr(s, gauge=gauge, b=b)


def resolve_number(spec: Optional[str], gauge: Gauge, default: Optional[str] = None) -> GenNum:
    if spec is None:
        spec = default
    return E.number_from_expr(spec, gauge=gauge)


def _eps_of(args, gauge: Gauge) -> float:
    if getattr(args, "eps", None) is not None:
        if not args.eps > 0:
            raise UsageError("--eps must be positive")
        return args.eps
    k = args.eps_index
    if k is None:
        k = gauge.k_max
    return gauge.eps_at(k)


def _xs(args, eps, b: float) -> list:
    """Uniform points plus the markers 0 and +-k/b (k = 1, 2, 3) in range."""
    n = args.points
    lo = args.xmin if args.xmin is not None else -4.0 / b
    hi = args.xmax if args.xmax is not None else 4.0 / b
    if n < 2 or not hi > lo:
        raise UsageError("need --points >= 2 and --xmax > --xmin")
    pts = {lo + (hi - lo) * i / (n - 1) for i in range(n)}
    for m in (0, 1, -1, 2, -2, 3, -3):
        p = m / b
        if lo <= p <= hi:
            pts.add(p)
    return sorted(pts)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_classify(args, cfg, gauge, out):
    x = resolve_number(args.expr, gauge)
    if cfg.output_format() == "csv":
        return _samples_csv({"value": x}, gauge, out)
    est = classify_order(x, log_corrected=args.log_corrected)
    rep = {"expr": args.expr, "gauge": cfg.gauge, **est.as_dict(), "points": est.points}
    emit_json(rep, "classify", out)


def _mollifier_from(args):
    from .mollifier import DEFAULT_J, DEFAULT_K, Mollifier1D, build_mollifier

    if getattr(args, "input", None):
        with open(args.input, encoding="utf-8") as fh:
            return Mollifier1D.from_json(json.load(fh))
    return build_mollifier(args.J if args.J is not None else DEFAULT_J, args.K if args.K is not None else DEFAULT_K, args.M)


def cmd_mollifier(args, cfg, gauge, out):
    from .mollifier import chi

    mol = _mollifier_from(args)
    if args.action == "build":
        emit_json(mol.to_json(), "mollifier", out)
    elif args.action == "check":
        res = mol.residuals()
        worst = max(abs(v) for v in res.values())
        ok = worst <= args.tol
        emit_json({"J": mol.J, "K": mol.K, "M": mol.M, "residuals": res, "max_residual": worst, "tolerance": args.tol, "ok": ok}, "mollifier_check", out)
        if not ok:
            raise VerdictFailure(f"mollifier residual {worst:.3g} exceeds {args.tol:.3g}")
    elif args.eps is None and args.eps_index is None:
        n = args.points
        lo = args.xmin if args.xmin is not None else -4.0
        hi = args.xmax if args.xmax is not None else 4.0
        xs = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
        emit_csv(["x", "mu", "chi"], ([x, float(mol(x)), float(chi(x))] for x in xs), out)
    else:
        from .functions import default_b
        from .mollifier import ScaledMollifierNet

        net = ScaledMollifierNet(default_b(gauge, args.b_exponent), mol)
        eps = _eps_of(args, gauge)
        b = float(net.b.value(eps))
        emit_csv(["x", "mu_eps_b"], ([x, float(net(eps, x))] for x in _xs(args, eps, b)), out)


def _slice_mode(args, cfg) -> bool:
    if cfg.format:
        return cfg.format == "csv"
    return args.x is None


def _slice_csv(f, args, gauge, out):
    eps = _eps_of(args, gauge)
    b = gauge.rho_pow(eps, -args.b_exponent)
    xs = _xs(args, eps, b)
    rows = []
    for x in xs:
        rows.append([x, float(f.net(eps, x))])
    emit_csv(["x", "value"], rows, out)


def cmd_embed(args, cfg, gauge, out):
    f = resolve_gsf(args.dist, gauge, args.b_exponent)
    if _slice_mode(args, cfg):
        return _slice_csv(f, args, gauge, out)
    x = resolve_number(args.x, gauge, "0")
    emit_json(_number_report(f(x), gauge, cfg, {"function": args.dist, "x": args.x or "0"}), "report", out)


def cmd_compose(args, cfg, gauge, out):
    from .functions import compose

    f = compose(resolve_gsf(args.outer, gauge, args.b_exponent), resolve_gsf(args.inner, gauge, args.b_exponent))
    if _slice_mode(args, cfg):
        return _slice_csv(f, args, gauge, out)
    x = resolve_number(args.x, gauge, "0")
    emit_json(_number_report(f(x), gauge, cfg, {"function": f"{args.outer} o {args.inner}", "x": args.x or "0"}), "report", out)


def cmd_derive(args, cfg, gauge, out):
    from .calculus import derivative

    f = resolve_gsf(args.f, gauge)
    x = resolve_number(args.x, gauge)
    d = derivative(f, x, order=args.order)
    if cfg.output_format() == "csv":
        return _samples_csv({"derivative": d}, gauge, out)
    emit_json(_number_report(d, gauge, cfg, {"function": args.f, "x": args.x, "order": args.order}), "report", out)


def cmd_integrate(args, cfg, gauge, out):
    from .calculus import integral

    f = resolve_gsf(args.f, gauge)
    a, b = resolve_number(args.a, gauge), resolve_number(args.b, gauge)
    I = integral(f, a, b, use_primitive=not args.quadrature, epsrel=cfg.quad_tol)
    if cfg.output_format() == "csv":
        return _samples_csv({"integral": I}, gauge, out)
    rep = _number_report(I, gauge, cfg, {"function": args.f, "a": args.a, "b": args.b}, log_corrected=args.log_corrected)
    rep["error_samples"] = [float(I.error(e)) for e in gauge.grid]
    emit_json(rep, "report", out)


def cmd_ivt(args, cfg, gauge, out):
    from .calculus import ivt_solve

    f = resolve_gsf(args.f, gauge)
    a, b, y = (resolve_number(s, gauge) for s in (args.a, args.b, args.y))
    dps = None
    if args.dps in (None, "auto"):
        dps = lambda e, q=args.qtarget: int((q + 6) * abs(gauge.log_rho(e)) / math.log(10)) + 20
    elif args.dps != "float":
        try:
            dps = int(args.dps)
        except ValueError:
            raise UsageError("--dps takes an integer, 'auto' or 'float'") from None
    c, res = ivt_solve(f, a, b, y, q_target=args.qtarget, dps=dps, return_residual=True)
    _prefetch([c], gauge, cfg.threads)
    est = classify_order(res)
    ok = est.classification.value == "Negligible" or (est.classification.value == "Moderate" and est.slope >= args.qtarget - 0.5)
    if cfg.output_format() == "csv":
        return _samples_csv({"c": c, "residual": res}, gauge, out)
    rep = _number_report(c, gauge, cfg, {"function": args.f, "residual_estimate": est.as_dict(), "residual_ok": ok})
    emit_json(rep, "report", out)
    if not ok:
        raise VerdictFailure("the residual does not reach the target order")


def cmd_taylor(args, cfg, gauge, out):
    from .calculus import taylor_remainder

    f = resolve_gsf(args.f, gauge)
    a, k = resolve_number(args.a, gauge), resolve_number(args.k, gauge)
    R, verdict, est = taylor_remainder(f, a, k, args.n)
    if cfg.output_format() == "csv":
        return _samples_csv({"remainder": R}, gauge, out)
    rep = _number_report(R, gauge, cfg, {"function": args.f, "n": args.n, "verdict": verdict})
    emit_json(rep, "report", out)
    if args.expect and args.expect != verdict:
        raise VerdictFailure(f"verdict {verdict} differs from the expected {args.expect}")


def cmd_measure(args, cfg, gauge, out):
    from .measure import measure

    K = E.set_from_expr(args.set, gauge)
    res = measure(K, cfg.mmax)
    if cfg.output_format() == "csv":
        header = ["k", "eps"] + [f"a{m}" for m in range(1, len(res.a) + 1)]
        rows = [[k, e] + [float(a.value(e)) for a in res.a] for k, e in zip(gauge.indices, gauge.grid)]
        return emit_csv(header, rows, out)
    emit_json({"set": args.set, **res.as_dict()}, "measure", out)
    if args.expect and args.expect != res.status:
        raise VerdictFailure(f"status {res.status} differs from the expected {args.expect}")


def cmd_hyperlim(args, cfg, gauge, out):
    from .hyper import hyperlimit

    grid = dict(k_min=cfg.kmin, k_max=cfg.kmax, eps0=cfg.eps0, theta=cfg.theta, q_max=cfg.qmax, n_max=cfg.nmax)
    sigma = Gauge(**grid) if args.sigma.strip() == "eps" else E.gauge_from_expr(args.sigma, **grid)
    rho = Gauge(**grid) if args.rho.strip() == "eps" else E.gauge_from_expr(args.rho, **grid)
    seq = E.sequence_from_expr(args.seq, sigma, rho)
    limit = E.number_from_expr(args.limit, gauge=rho) if args.limit is not None else None
    res = hyperlimit(seq, limit, q_max=args.qmax_seq)
    emit_json({"seq": args.seq, "sigma": args.sigma, "rho": args.rho, **res.as_dict()}, "hyperlim", out)
    if args.expect and args.expect.lower() != res.verdict.lower():
        raise VerdictFailure(f"verdict {res.verdict} differs from the expected {args.expect}")


def cmd_selftest(args, cfg, gauge, out):
    from .acceptance import run_all

    results = run_all(seed=cfg.seed, trace_dir=args.trace_dir, echo=lambda s: out.write(s + "\n"))
    failed = [r.number for r in results if not r.passed]
    out.write(f"{len(results) - len(failed)}/{len(results)} criteria passed\n")
    if failed:
        raise VerdictFailure(f"criteria failed: {failed}")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _common(p: argparse.ArgumentParser, classifier_qmax: str = "--qmax"):
    g = p.add_argument_group("configuration")
    g.add_argument("--config", help="key = value configuration file (else $GSF_CONFIG)")
    g.add_argument("--gauge", help="gauge expression in eps (default eps)")
    g.add_argument("--eps0", type=float)
    g.add_argument("--theta", type=float)
    g.add_argument("--kmin", type=int)
    g.add_argument("--kmax", type=int)
    g.add_argument(classifier_qmax, dest="qmax", type=int, help="largest order tested by the classifiers")
    g.add_argument("--nmax", type=int, help="largest moderateness exponent")
    g.add_argument("--mmax", type=int, help="largest enlargement index for measures")
    g.add_argument("--quad-tol", dest="quad_tol", type=float)
    g.add_argument("--format", choices=("json", "csv"))
    g.add_argument("--out", help="output file (default standard output)")
    g.add_argument("--seed", type=int)
    g.add_argument("--threads", type=int)


def _slice_args(p, point: bool = True):
    p.add_argument("--eps-index", dest="eps_index", type=int, help="slice at eps = eps0*theta**k (default: the last grid point)")
    p.add_argument("--eps", type=float, help="slice at this eps")
    p.add_argument("--b-exponent", dest="b_exponent", type=float, default=1.0, help="embedding scale b = drho**-a")
    p.add_argument("--xmin", type=float, help="default -4/b")
    p.add_argument("--xmax", type=float, help="default 4/b")
    p.add_argument("--points", type=int, default=1001)
    if point:
        p.add_argument("--x", help="evaluation point (number expression); selects JSON output")


def build_parser() -> argparse.ArgumentParser:
    p = _ArgParser(prog=PROG, description="Generalized numbers and generalized smooth functions on an eps grid.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_ArgParser)

    s = sub.add_parser("classify", help="order classification of a number net")
    _common(s)
    s.add_argument("--expr", required=True)
    s.add_argument("--log-corrected", action="store_true")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("mollifier", help="build, check or sample the mollifier")
    _common(s)
    s.add_argument("action", choices=("build", "check", "sample"))
    s.add_argument("--J", type=int)
    s.add_argument("--K", type=int)
    s.add_argument("--M", type=int)
    s.add_argument("--input", help="mollifier JSON written by 'mollifier build'")
    s.add_argument("--tol", type=float, default=1e-10)
    _slice_args(s, point=False)
    s.set_defaults(func=cmd_mollifier)

    s = sub.add_parser("embed", help="embedded distribution: a slice (csv) or a point net (json)")
    _common(s)
    s.add_argument("--dist", required=True, help="delta, heaviside or smooth:<expr>")
    _slice_args(s)
    s.set_defaults(func=cmd_embed)

    s = sub.add_parser("compose", help="composition outer o inner")
    _common(s)
    s.add_argument("--outer", required=True)
    s.add_argument("--inner", required=True)
    _slice_args(s)
    s.set_defaults(func=cmd_compose)

    s = sub.add_parser("derive", help="derivative at a point net")
    _common(s)
    s.add_argument("--f", required=True)
    s.add_argument("--x", required=True)
    s.add_argument("--order", type=int, default=1)
    s.set_defaults(func=cmd_derive)

    s = sub.add_parser("integrate", help="integral between point nets")
    _common(s)
    s.add_argument("--f", required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--quadrature", action="store_true", help="ignore registered primitives")
    s.add_argument("--log-corrected", action="store_true")
    s.set_defaults(func=cmd_integrate)

    s = sub.add_parser("ivt", help="intermediate value solve")
    _common(s)
    s.add_argument("--f", required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--y", required=True)
    s.add_argument("--qtarget", type=int, default=12)
    s.add_argument("--dps", help="mpmath digits per sample, 'auto' (default, enough for the target order) or 'float'")
    s.set_defaults(func=cmd_ivt)

    s = sub.add_parser("taylor", help="Taylor remainder and verdict")
    _common(s)
    s.add_argument("--f", required=True)
    s.add_argument("--a", required=True)
    s.add_argument("--k", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--expect", choices=("Infinitesimal", "NotInfinitesimal"))
    s.set_defaults(func=cmd_taylor)

    s = sub.add_parser("measure", help="measure of a set expression")
    _common(s)
    s.add_argument("--set", required=True, help="interval(a,b), points(...), seq(term, n0[, limit]) or union(...)")
    s.add_argument("--expect", choices=("Measurable", "NotMeasurable", "Undetermined"))
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("hyperlim", help="hyperlimit test of a sequence")
    _common(s, classifier_qmax="--classifier-qmax")
    s.add_argument("--seq", required=True, help="expression in n, eps and drho")
    s.add_argument("--sigma", default="eps", help="index gauge expression")
    s.add_argument("--rho", default="eps", help="value gauge expression")
    s.add_argument("--limit", help="candidate limit (number expression); estimated when omitted")
    s.add_argument("--qmax", dest="qmax_seq", type=int, default=6, help="largest q tested")
    s.add_argument("--expect", type=str.capitalize, choices=("Confirmed", "Refuted", "Undetermined"))
    s.set_defaults(func=cmd_hyperlim)

    s = sub.add_parser("selftest", help="run the acceptance suite")
    _common(s)
    s.add_argument("--trace-dir", dest="trace_dir", help="directory for measure traces")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = build_config(args)
        gauge = cfg.make_gauge()
    except UsageError as exc:
        sys.stderr.write(f"{PROG}: error: {exc}\n")
        return 2
    except E.ParseError as exc:
        sys.stderr.write(f"{PROG}: error: {exc}\n")
        return 2
    buf = io.StringIO()
    code = 0
    try:
        args.func(args, cfg, gauge, buf)
    except (UsageError, E.ParseError) as exc:
        sys.stderr.write(f"{PROG}: error: {exc}\n")
        return 2
    except VerdictFailure as exc:
        sys.stderr.write(f"{PROG}: {exc}\n")
        code = 1
    except (ArithmeticError, ValueError, NotImplementedError) as exc:
        sys.stderr.write(f"{PROG}: computation failed: {type(exc).__name__}: {exc}\n")
        return 1
    text = buf.getvalue()
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
