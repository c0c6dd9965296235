"""A small expression language for gauges, nets, numbers, sequences and sets.

Precedence from loosest to tightest: comparisons (only as the condition of
``if``), ``+ -``, ``* /``, ``^`` (right associative), unary sign. Thus
``-2^2`` is ``(-2)^2``. The grammar is written out in ``docs/grammar.ebnf``.

Evaluation goes through :mod:`gsf.jet`, so a parsed net can be evaluated on
floats, jets (for exact derivatives), mpmath numbers and ExtReal indices.
Errors carry byte spans into the source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath

from . import jet as J_
from .jet import Jet, real_part

MAX_DEPTH = 200

CONTEXTS = {
    "gauge": {"eps"},
    "net": {"eps", "x", "drho", "b"} | {f"x{i}" for i in range(1, 10)},
    "sequence": {"eps", "n", "drho"},
    "number": {"eps", "drho", "b"},
    "set": {"eps", "n", "drho", "b"},
}
CONSTANTS = {"pi": math.pi}
# name -> (min args, max args)
ARITY = {
    "sin": (1, 1),
    "cos": (1, 1),
    "exp": (1, 1),
    "log": (1, 1),
    "abs": (1, 1),
    "pow": (2, 2),
    "min": (2, 32),
    "max": (2, 32),
    "int": (1, 1),
    "mu": (1, 1),
    "chi": (1, 1),
    "if": (3, 3),
}
SET_ARITY = {"interval": (2, 2), "points": (1, 64), "seq": (2, 3), "union": (1, 16)}
COMPARE_OPS = ("<=", ">=", "==", "!=", "<", ">")


@dataclass(frozen=True)
class SourceSpan:
    """Half-open byte range ``[start, end)`` in the UTF-8 source."""

    start: int
    end: int


class ParseError(ValueError):
    def __init__(self, message: str, span: SourceSpan, expected: Sequence[str] = ()):
        self.message = message
        self.span = span
        self.expected = tuple(expected)
        extra = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at bytes {span.start}..{span.end}{extra}")


class UnboundVariable(ParseError):
    pass


class ArityMismatch(ParseError):
    pass


class DomainError(ArithmeticError):
    def __init__(self, message: str, span: SourceSpan):
        self.message = message
        self.span = span
        super().__init__(f"{message} at bytes {span.start}..{span.end}")


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Node:
    span: SourceSpan = field(default=SourceSpan(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class Num(Node):
    value: float = 0.0


@dataclass(frozen=True)
class Var(Node):
    name: str = ""


@dataclass(frozen=True)
class Unary(Node):
    op: str = "-"
    operand: Optional[Node] = None


@dataclass(frozen=True)
class Bin(Node):
    op: str = "+"
    left: Optional[Node] = None
    right: Optional[Node] = None


@dataclass(frozen=True)
class Compare(Node):
    op: str = "<"
    left: Optional[Node] = None
    right: Optional[Node] = None


@dataclass(frozen=True)
class Call(Node):
    name: str = ""
    args: tuple = ()


Ast = Node


# ---------------------------------------------------------------------------
# lexer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # num, ident, op, end
    text: str
    span: SourceSpan


def _byte_offsets(src: str) -> list[int]:
    out = [0]
    for ch in src:
        out.append(out[-1] + len(ch.encode("utf-8")))
    return out


def tokenize(src: str) -> list[Token]:
    offs = _byte_offsets(src)
    toks = []
    i, n = 0, len(src)
    while i < n:
        ch = src[i]
        if ch in " \t\r\n":
            i += 1
            continue
        start = i
        if ch.isdigit() or (ch == "." and i + 1 < n and src[i + 1].isdigit()):
            while i < n and src[i].isdigit():
                i += 1
            if i < n and src[i] == ".":
                i += 1
                while i < n and src[i].isdigit():
                    i += 1
            if i < n and src[i] in "eE":
                j = i + 1
                if j < n and src[j] in "+-":
                    j += 1
                if j < n and src[j].isdigit():
                    i = j
                    while i < n and src[i].isdigit():
                        i += 1
            toks.append(Token("num", src[start:i], SourceSpan(offs[start], offs[i])))
            continue
        if ch.isascii() and (ch.isalpha() or ch == "_"):
            while i < n and src[i].isascii() and (src[i].isalnum() or src[i] == "_"):
                i += 1
            toks.append(Token("ident", src[start:i], SourceSpan(offs[start], offs[i])))
            continue
        two = src[i : i + 2]
        if two in ("<=", ">=", "==", "!="):
            toks.append(Token("op", two, SourceSpan(offs[i], offs[i + 2])))
            i += 2
            continue
        if ch in "+-*/^(),<>":
            toks.append(Token("op", ch, SourceSpan(offs[i], offs[i + 1])))
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", SourceSpan(offs[i], offs[i + 1]))
    toks.append(Token("end", "", SourceSpan(offs[n], offs[n])))
    return toks


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, src: str, context: str, dim: int):
        if context not in CONTEXTS:
            raise ValueError(f"unknown context {context!r}")
        self.toks = tokenize(src)
        self.pos = 0
        self.context = context
        self.dim = dim
        self.depth = 0
        self.vars = set(CONTEXTS[context])
        if context == "net":
            self.vars = {"eps", "drho", "b"} | {f"x{i}" for i in range(1, dim + 1)}
            if dim == 1:
                self.vars.add("x")
        self.calls = dict(ARITY)
        if context == "set":
            self.calls.update(SET_ARITY)

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def advance(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, text: str) -> Token:
        if self.tok.text != text or self.tok.kind not in ("op",):
            raise ParseError(f"expected {text!r}", self.tok.span, [text])
        return self.advance()

    def _enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ParseError("expression nested too deeply", self.tok.span)

    def parse(self) -> Node:
        node = self.additive()
        if self.tok.kind != "end":
            if self.tok.text in COMPARE_OPS:
                raise ParseError("comparisons are only allowed as the condition of if()", self.tok.span)
            raise ParseError(f"unexpected token {self.tok.text!r}", self.tok.span, ["+", "-", "*", "/", "^", "end of input"])
        return node

    def condition(self) -> Node:
        left = self.additive()
        if self.tok.text in COMPARE_OPS and self.tok.kind == "op":
            op = self.advance().text
            right = self.additive()
            return Compare(SourceSpan(left.span.start, right.span.end), op, left, right)
        raise ParseError("the first argument of if() must be a comparison", self.tok.span, list(COMPARE_OPS))

    @staticmethod
    def _join(a: Node, b: Node) -> SourceSpan:
        return SourceSpan(a.span.start, b.span.end)

    def additive(self) -> Node:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.advance().text
            right = self.term()
            node = Bin(self._join(node, right), op, node, right)
        return node

    def term(self) -> Node:
        node = self.power()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.advance().text
            right = self.power()
            node = Bin(self._join(node, right), op, node, right)
        return node

    def power(self) -> Node:
        self._enter()
        base = self.unary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            exponent = self.power()
            base = Bin(self._join(base, exponent), "^", base, exponent)
        self.depth -= 1
        return base

    def unary(self) -> Node:
        if self.tok.kind == "op" and self.tok.text in "+-":
            self._enter()
            t = self.advance()
            operand = self.unary()
            self.depth -= 1
            if t.text == "+":
                return operand
            return Unary(SourceSpan(t.span.start, operand.span.end), "-", operand)
        return self.primary()

    def primary(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(t.span, float(t.text))
        if t.kind == "ident":
            self.advance()
            if self.tok.kind == "op" and self.tok.text == "(":
                return self.call(t)
            if t.text in CONSTANTS:
                return Num(t.span, CONSTANTS[t.text])
            if t.text not in self.vars:
                raise UnboundVariable(f"variable {t.text!r} is not bound in {self.context} context", t.span, sorted(self.vars))
            return Var(t.span, t.text)
        if t.kind == "op" and t.text == "(":
            self._enter()
            self.advance()
            node = self.additive()
            close = self.expect(")")
            self.depth -= 1
            return _respan(node, SourceSpan(t.span.start, close.span.end))
        raise ParseError("expected a number, variable, call or '('", t.span, ["number", "identifier", "("])

    def call(self, name: Token) -> Node:
        if name.text not in self.calls:
            raise ParseError(f"unknown function {name.text!r}", name.span, sorted(self.calls))
        self._enter()
        self.expect("(")
        args = []
        if not (self.tok.kind == "op" and self.tok.text == ")"):
            while True:
                if name.text == "if" and not args:
                    args.append(self.condition())
                else:
                    args.append(self.additive())
                if self.tok.kind == "op" and self.tok.text == ",":
                    self.advance()
                    continue
                break
        close = self.expect(")")
        self.depth -= 1
        span = SourceSpan(name.span.start, close.span.end)
        lo, hi = self.calls[name.text]
        if not lo <= len(args) <= hi:
            want = str(lo) if lo == hi else f"{lo}..{hi}"
            raise ArityMismatch(f"{name.text}() takes {want} arguments, got {len(args)}", span)
        return Call(span, name.text, tuple(args))


def _respan(node: Node, span: SourceSpan) -> Node:
    return type(node)(span, *[getattr(node, f) for f in node.__dataclass_fields__ if f != "span"])


def parse(src: str, context: str = "net", dim: int = 1) -> Node:
    """Parse ``src`` in a binding context (gauge, net, sequence, number, set)."""
    if isinstance(src, bytes):
        try:
            src = src.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError("input is not valid UTF-8", SourceSpan(exc.start, exc.end)) from None
    return _Parser(src, context, dim).parse()


# ---------------------------------------------------------------------------
# printer
# ---------------------------------------------------------------------------


def _num_text(v: float) -> str:
    if math.isinf(v):
        return "1e999"
    if v == math.pi:
        return "pi"
    return repr(float(v))


def to_source(node: Node) -> str:
    """Canonical, fully parenthesized source text."""
    if isinstance(node, Num):
        return _num_text(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        return f"(-{to_source(node.operand)})"
    if isinstance(node, Compare):
        # only valid as the bare condition of if(), never parenthesized
        return f"{to_source(node.left)} {node.op} {to_source(node.right)}"
    if isinstance(node, Bin):
        return f"({to_source(node.left)} {node.op} {to_source(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_source(a) for a in node.args)})"
    raise TypeError(node)


def free_variables(node: Node) -> set:
    if isinstance(node, Var):
        return {node.name}
    out = set()
    for f in ("operand", "left", "right"):
        child = getattr(node, f, None)
        if child is not None:
            out |= free_variables(child)
    for a in getattr(node, "args", ()):
        out |= free_variables(a)
    return out


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _is_plain(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _is_int(v) -> bool:
    return _is_plain(v) and float(v).is_integer()


def _pow(a, p, span):
    if isinstance(p, Jet):
        if real_part(a) <= 0:
            raise DomainError("power with a variable exponent needs a positive base", span)
        return J_.exp(p * J_.log(a))
    if _is_int(p) and abs(p) < 2 ** 31:
        k = int(p)
        if k < 0:
            if real_part(a) == 0:
                raise DomainError("zero raised to a negative power", span)
            return 1 / (a ** (-k))
        return a ** k
    ra = real_part(a)
    if ra < 0:
        raise DomainError("negative base with a non-integer exponent", span)
    if ra == 0:
        if p < 0:
            raise DomainError("zero raised to a negative power", span)
        return a * 0.0 if isinstance(a, Jet) else 0.0 * a
    return J_.power(a, p)


def _mollifier():
    from .mollifier import default_mollifier

    return default_mollifier()


def _chi(u):
    from .mollifier import chi

    return chi(u)


def _call(node: Call, args: list):
    name, span = node.name, node.span
    if name == "sin":
        return J_.sin(args[0])
    if name == "cos":
        return J_.cos(args[0])
    if name == "exp":
        return J_.exp(args[0])
    if name == "log":
        if real_part(args[0]) <= 0:
            raise DomainError("log of a nonpositive number", span)
        return J_.log(args[0])
    if name == "abs":
        return J_.fabs(args[0])
    if name == "pow":
        return _pow(args[0], args[1], span)
    if name == "min":
        return min(args, key=real_part)
    if name == "max":
        return max(args, key=real_part)
    if name == "int":
        v = real_part(args[0])
        if getattr(v, "_gsf_ext", None) is not None:
            return v
        if isinstance(v, mpmath.mpf):
            return mpmath.mpf(int(v))
        if not math.isfinite(v):
            raise DomainError("int() of a non-finite number", span)
        return float(math.trunc(v))
    if name == "mu":
        return _mollifier()(args[0])
    if name == "chi":
        return _chi(args[0])
    raise DomainError(f"function {name!r} is not available here", span)


def _compare(op, a, b) -> bool:
    a, b = real_part(a), real_part(b)
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b, "==": a == b, "!=": a != b}[op]


def eval_ast(node: Node, bindings: dict):
    """Evaluate ``node``; ``bindings`` maps variable names to values."""
    try:
        return _eval(node, bindings)
    except (OverflowError, ZeroDivisionError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise DomainError(f"arithmetic failure: {exc}", node.span) from None


def _eval(node: Node, env: dict):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name not in env:
            raise DomainError(f"no value bound for {node.name!r}", node.span)
        return env[node.name]
    if isinstance(node, Unary):
        return -_eval(node.operand, env)
    if isinstance(node, Bin):
        a = _eval(node.left, env)
        b = _eval(node.right, env)
        op = node.op
        try:
            if op == "+":
                return a + b
            if op == "-":
                return a - b
            if op == "*":
                return a * b
            if op == "/":
                if real_part(b) == 0 and not isinstance(b, Jet):
                    raise DomainError("division by zero", node.span)
                return a / b
            return _pow(a, b, node.span)
        except (OverflowError, ZeroDivisionError, ValueError) as exc:
            raise DomainError(f"arithmetic failure: {exc}", node.span) from None
    if isinstance(node, Call):
        if node.name == "if":
            cond = node.args[0]
            pick = _compare(cond.op, _eval(cond.left, env), _eval(cond.right, env))
            return _eval(node.args[1] if pick else node.args[2], env)
        args = [_eval(a, env) for a in node.args]
        try:
            out = _call(node, args)
        except (OverflowError, ZeroDivisionError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise DomainError(f"arithmetic failure in {node.name}(): {exc}", node.span) from None
        return out
    raise DomainError(f"cannot evaluate {type(node).__name__} here", node.span)


# ---------------------------------------------------------------------------
# symbolic logarithm (for gauges that underflow)
# ---------------------------------------------------------------------------


def log_of(node: Node) -> Node:
    """An expression for ``log|node|`` that avoids forming ``node`` itself
    where the structure allows (exp, products, quotients, powers, signs)."""
    s = node.span
    if isinstance(node, Num):
        return Num(s, math.log(abs(node.value)) if node.value != 0 else -math.inf)
    if isinstance(node, Unary):
        return log_of(node.operand)
    if isinstance(node, Call) and node.name == "exp":
        return node.args[0]
    if isinstance(node, Call) and node.name == "pow":
        return Bin(s, "*", node.args[1], log_of(node.args[0]))
    if isinstance(node, Call) and node.name == "abs":
        return log_of(node.args[0])
    if isinstance(node, Bin):
        if node.op == "*":
            return Bin(s, "+", log_of(node.left), log_of(node.right))
        if node.op == "/":
            return Bin(s, "-", log_of(node.left), log_of(node.right))
        if node.op == "^":
            return Bin(s, "*", node.right, log_of(node.left))
    return Call(s, "log", (Call(s, "abs", (node,)),))


# ---------------------------------------------------------------------------
# constructors for library objects
# ---------------------------------------------------------------------------


def gauge_from_expr(src: str, **grid):
    """A :class:`~gsf.gauge.Gauge` whose rho is given by an expression in eps."""
    from .gauge import Gauge

    ast = parse(src, "gauge")
    lg = log_of(ast)
    llg = log_of(Unary(lg.span, "-", lg))

    def rho(e):
        try:
            return float(eval_ast(ast, {"eps": e}))
        except (DomainError, OverflowError):
            return 0.0

    def log_rho(e):
        return float(eval_ast(lg, {"eps": e}))

    def loglog(e):
        try:
            return float(eval_ast(llg, {"eps": e}))
        except DomainError:
            return math.log(-log_rho(e))

    return Gauge(rho=rho, log_rho_fn=log_rho, loglog_inv_fn=loglog, name=src, **grid)


def _net_env(gauge, b, e) -> dict:
    return {"eps": e, "drho": gauge.rho_pow(e, 1), "b": b.value(e) if b is not None else gauge.rho_pow(e, -1)}


def net_from_expr(src: str, gauge=None, dim: int = 1, b=None):
    """A :class:`~gsf.functions.SmoothNet` ``(eps, x) -> expr``."""
    from .functions import SmoothNet
    from .gauge import STANDARD

    gauge = gauge or STANDARD
    ast = parse(src, "net", dim)

    def fn(e, x):
        env = _net_env(gauge, b, e)
        if dim == 1:
            env["x"] = env["x1"] = x
        else:
            for i, xi in enumerate(x, start=1):
                env[f"x{i}"] = xi
        return eval_ast(ast, env)

    return SmoothNet(fn, n_in=dim, name=src)


def gsf_from_expr(src: str, gauge=None, dim: int = 1, b=None, domain=None):
    from .functions import GSF
    from .gauge import STANDARD

    gauge = gauge or STANDARD
    return GSF(net_from_expr(src, gauge, dim, b), gauge=gauge, domain=domain, name=src)


def number_from_expr(src: str, gauge=None, b=None):
    """A :class:`~gsf.gauge.GenNum` ``eps -> expr``."""
    from .gauge import STANDARD, GenNum

    gauge = gauge or STANDARD
    ast = parse(src, "number")
    return GenNum(gauge, lambda e: eval_ast(ast, _net_env(gauge, b, e)), name=src)


def sequence_from_expr(src: str, sigma=None, rho=None):
    """A :class:`~gsf.hyper.HyperSeq` ``(eps, n) -> expr`` (``drho`` is the
    value gauge)."""
    from .gauge import STANDARD
    from .hyper import HyperSeq

    sigma = sigma or STANDARD
    rho = rho or STANDARD
    ast = parse(src, "sequence")

    def term(e, n):
        return eval_ast(ast, {"eps": e, "n": n, "drho": rho.rho_pow(e, 1)})

    return HyperSeq(sigma, rho, term, name=src)


def _mp_term(ast: Node, extra: dict):
    def term(n):
        digits = 30 + int(1.2 * math.log10(max(float(n), 10.0)))
        with mpmath.workdps(digits):
            return eval_ast(ast, {**extra, "n": mpmath.mpf(n)})

    return term


def set_from_expr(src: str, gauge=None, b=None):
    """A :class:`~gsf.sets.FunctCompact` from a set expression.

    ``interval(lo, hi)``, ``points(p1, ...)``, ``seq(term_in_n, n0[, limit])``
    and ``union(S1, ...)``; numbers may use eps, drho and b.
    """
    from .gauge import STANDARD
    from .sets import Box, ConvergentSequence, FinitePoints, FiniteUnion, FunctCompact

    gauge = gauge or STANDARD
    ast = parse(src, "set")

    def number(node):
        if "n" in free_variables(node):
            raise ParseError("n is only bound inside seq()", node.span)
        return lambda e: float(eval_ast(node, _net_env(gauge, b, e)))

    def build(node):
        if not isinstance(node, Call) or node.name not in SET_ARITY:
            raise ParseError("expected a set constructor", node.span, sorted(SET_ARITY))
        if node.name == "interval":
            return Box(number(node.args[0]), number(node.args[1]))
        if node.name == "points":
            fns = [number(a) for a in node.args]
            return FinitePoints(lambda e: [f(e) for f in fns])
        if node.name == "union":
            return FiniteUnion([build(a) for a in node.args])
        term_ast = node.args[0]
        if free_variables(term_ast) - {"n"}:
            raise ParseError("a seq() term may only depend on n", term_ast.span)
        n0 = int(number(node.args[1])(1.0))
        limit = number(node.args[2])(1.0) if len(node.args) > 2 else 0.0
        mp_term = _mp_term(term_ast, {})

        def term(n):
            return float(mp_term(n))

        def gap(n):
            digits = 30 + int(1.2 * math.log10(max(float(n), 10.0)))
            with mpmath.workdps(digits):
                return float(mp_term(n) - mp_term(mpmath.mpf(n) + 1))

        return ConvergentSequence(term, n0, limit, gap=gap, name=to_source(term_ast))

    return FunctCompact.of(build(ast), gauge)
