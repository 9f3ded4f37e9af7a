"""A small expression language for symbols.

Grammar (``^`` binds tightest, then unary minus, then ``*``, then ``+``/``-``)::

    expr    := term (("+" | "-") term)*
    term    := unary ("*" unary)*
    unary   := ("-" | "+") unary | power
    power   := primary ("^" INT)?            # right operand: nonnegative integer
    primary := NUMBER | IMAG | "z" | "zbar" | "pi" | "i"
             | ("conj" | "tilde" | "star") "(" expr ")"
             | "blaschke" "(" const ")"
             | "arc" "(" const "," const ")"
             | "decay" "(" const ")"
             | "trigpoly" "(" INT ":" const ("," INT ":" const)* ")"
             | "(" expr ")"

``IMAG`` is a number with an ``i`` or ``j`` suffix (``2i``, ``0.5j``).  Arguments
marked ``const`` must not mention ``z``.  There is deliberately no division.

>>> lower(parse("z + zbar")).coeffs
{-1: (1+0j), 1: (1+0j)}
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import symbols as sc

MAX_DEPTH = 200
MAX_POWER = 4096


class SymbolSyntaxError(ValueError):
    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


class LoweringError(ValueError):
    pass


# -- AST ----------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: complex


@dataclass(frozen=True)
class Var:
    name: str  # "z" | "zbar"


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" | "conj" | "tilde" | "star"
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str  # "add" | "sub" | "mul"
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Pow:
    base: "Node"
    exponent: int


@dataclass(frozen=True)
class Call:
    name: str  # "blaschke" | "arc" | "decay"
    args: tuple


@dataclass(frozen=True)
class TrigPoly:
    terms: tuple  # ((degree, Node), ...)


Node = Union[Num, Var, Unary, BinOp, Pow, Call, TrigPoly]
SymbolExpr = Node

UNARY_FUNCS = {"conj", "tilde", "star"}
BUILTINS = {"blaschke": 1, "arc": 2, "decay": 1}


# -- lexer --------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?[ij]?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*^(),:])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SymbolSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            t = m.group()
            tokens.append(Token(kind, "^" if t == "**" else t, line, m.start() - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# -- parser -------------------------------------------------------------------

class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0
        self.depth = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.tok
        raise SymbolSyntaxError(msg, tok.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            self.error(f"expected {text!r}, found {found!r}")

    def enter(self):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.error("expression nested too deeply")

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Node:
        self.enter()
        node = self.term()
        while True:
            if self.accept("+"):
                node = BinOp("add", node, self.term())
            elif self.accept("-"):
                node = BinOp("sub", node, self.term())
            else:
                break
        self.depth -= 1
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.accept("*"):
            node = BinOp("mul", node, self.unary())
        return node

    def unary(self) -> Node:
        self.enter()
        if self.accept("-"):
            node = Unary("neg", self.unary())
        elif self.accept("+"):
            node = self.unary()
        else:
            node = self.power()
        self.depth -= 1
        return node

    def power(self) -> Node:
        base = self.primary()
        if self.accept("^"):
            tok = self.tok
            if tok.kind != "num" or not tok.text.isdigit():
                self.error("exponent must be a nonnegative integer literal")
            self.i += 1
            base = Pow(base, int(tok.text))
        return base

    def number(self, text: str, tok: Token) -> complex:
        imag = text[-1] in "ij"
        try:
            val = float(text[:-1] if imag else text)
        except ValueError:  # pragma: no cover - the lexer only admits valid floats
            self.error(f"bad number {text!r}", tok)
        if not math.isfinite(val):
            self.error(f"number {text!r} is out of range", tok)
        return complex(0, val) if imag else complex(val)

    def primary(self) -> Node:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(self.number(tok.text, tok))
        if tok.kind == "name":
            self.i += 1
            name = tok.text
            if name in ("z", "zbar"):
                return Var(name)
            if name == "pi":
                return Num(complex(math.pi))
            if name in ("i", "j"):
                return Num(1j)
            if name in UNARY_FUNCS:
                args = self.call_args(name, tok)
                if len(args) != 1:
                    self.error(f"{name}() takes 1 argument, got {len(args)}", tok)
                return Unary(name, args[0])
            if name in BUILTINS:
                args = self.call_args(name, tok)
                if len(args) != BUILTINS[name]:
                    self.error(f"{name}() takes {BUILTINS[name]} argument(s), got {len(args)}", tok)
                return Call(name, tuple(args))
            if name == "trigpoly":
                return self.trigpoly(tok)
            self.error(f"unknown identifier {name!r}", tok)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"unexpected {tok.text or 'end of input'!r}")

    def call_args(self, name: str, tok: Token) -> list[Node]:
        self.expect("(")
        args = []
        if self.accept(")"):
            return args
        args.append(self.expr())
        while self.accept(","):
            args.append(self.expr())
        self.expect(")")
        return args

    def trigpoly(self, tok: Token) -> TrigPoly:
        self.expect("(")
        terms = []
        while True:
            neg = self.accept("-")
            if not neg:
                self.accept("+")
            t = self.tok
            if t.kind != "num" or not t.text.isdigit():
                self.error("trigpoly terms look like 'degree: coefficient'")
            self.i += 1
            deg = -int(t.text) if neg else int(t.text)
            self.expect(":")
            terms.append((deg, self.expr()))
            if not self.accept(","):
                break
        self.expect(")")
        if not terms:
            self.error("trigpoly needs at least one term", tok)
        return TrigPoly(tuple(terms))


def parse(text: str) -> Node:
    """Parse an expression; raises :class:`SymbolSyntaxError` with a position."""
    if not isinstance(text, str):
        raise SymbolSyntaxError("expression must be a string")
    try:
        return _Parser(tokenize(text)).parse()
    except RecursionError:
        raise SymbolSyntaxError("expression nested too deeply") from None


# -- printer ------------------------------------------------------------------

def _fmt_number(v: complex) -> str:
    if v.imag == 0:
        return repr(float(v.real)) if v.real >= 0 else f"({repr(float(v.real))})"
    if v.real == 0 and v.imag >= 0:
        return f"{repr(float(v.imag))}i"
    return f"({repr(float(v.real))} + {repr(float(v.imag))}i)".replace("+ -", "- ")


def to_text(node: Node) -> str:
    """Fully parenthesised text that parses back to the same tree."""
    if isinstance(node, Num):
        return _fmt_number(node.value)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"(-{to_text(node.operand)})"
        return f"{node.op}({to_text(node.operand)})"
    if isinstance(node, BinOp):
        sym = {"add": "+", "sub": "-", "mul": "*"}[node.op]
        return f"({to_text(node.left)} {sym} {to_text(node.right)})"
    if isinstance(node, Pow):
        return f"({to_text(node.base)})^{node.exponent}"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(to_text(a) for a in node.args)})"
    if isinstance(node, TrigPoly):
        return "trigpoly(" + ", ".join(f"{d}: {to_text(c)}" for d, c in node.terms) + ")"
    raise TypeError(f"not an expression node: {node!r}")


# -- lowering -----------------------------------------------------------------

@dataclass(frozen=True)
class LoweringOptions:
    band_request: int = sc.DEFAULT_PRODUCT_BAND
    grid_size: int = 4 * 4096

    def __post_init__(self):
        if self.band_request < 1:
            raise LoweringError("band_request must be positive")
        if self.grid_size & (self.grid_size - 1) or self.grid_size < 4 * self.band_request:
            raise LoweringError("grid_size must be a power of two and at least 4 * band_request")


def const_value(node: Node) -> complex:
    """Evaluate a ``z``-free subtree to a complex number."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Unary):
        v = const_value(node.operand)
        return {"neg": -v, "conj": v.conjugate(), "tilde": v, "star": v.conjugate()}[node.op]
    if isinstance(node, BinOp):
        a, b = const_value(node.left), const_value(node.right)
        return {"add": a + b, "sub": a - b, "mul": a * b}[node.op]
    if isinstance(node, Pow):
        return const_value(node.base) ** node.exponent
    raise LoweringError(f"argument {to_text(node)} must be a constant")


def _real_arg(node: Node, what: str) -> float:
    v = const_value(node)
    if abs(v.imag) > 0:
        raise LoweringError(f"{what} must be real, got {v}")
    return v.real


def lower(expr: Node | str, opts: LoweringOptions | None = None) -> sc.Symbol:
    """Turn an expression into a :class:`~hankellab.symbols.Symbol` with certified bounds."""
    opts = opts or LoweringOptions()
    if isinstance(expr, str):
        expr = parse(expr)
    return _lower(expr, opts)


def _lower(node: Node, opts: LoweringOptions) -> sc.Symbol:
    if isinstance(node, Num):
        return sc.constant(node.value)
    if isinstance(node, Var):
        return sc.monomial(1 if node.name == "z" else -1)
    if isinstance(node, Unary):
        inner = _lower(node.operand, opts)
        if node.op == "neg":
            return sc.linear_combine([(-1.0, inner)])
        return sc.conj_family(inner, node.op)
    if isinstance(node, BinOp):
        a, b = _lower(node.left, opts), _lower(node.right, opts)
        if node.op == "add":
            return sc.linear_combine([(1.0, a), (1.0, b)])
        if node.op == "sub":
            return sc.linear_combine([(1.0, a), (-1.0, b)])
        return sc.multiply(a, b, band=opts.band_request)
    if isinstance(node, Pow):
        if node.exponent > MAX_POWER:
            raise LoweringError(f"exponent {node.exponent} exceeds {MAX_POWER}")
        base = _lower(node.base, opts)
        out = sc.constant(1.0)
        for _ in range(node.exponent):
            out = sc.multiply(out, base, band=opts.band_request)
        return out
    if isinstance(node, TrigPoly):
        coeffs: dict[int, complex] = {}
        for d, c in node.terms:
            coeffs[d] = coeffs.get(d, 0) + const_value(c)
        return sc.trigpoly(coeffs)
    if isinstance(node, Call):
        if node.name == "blaschke":
            a = const_value(node.args[0])
            if not abs(a) < 1:
                raise LoweringError(f"blaschke parameter {a} must lie strictly inside the unit disk")
            return sc.mobius_symbol(a)
        if node.name == "arc":
            alpha = _real_arg(node.args[0], "arc start")
            beta = _real_arg(node.args[1], "arc end")
            if beta < alpha:
                alpha, beta = beta, alpha
            try:
                return sc.arc_indicator(alpha, beta)
            except sc.SymbolError as exc:
                raise LoweringError(str(exc)) from None
        if node.name == "decay":
            p = _real_arg(node.args[0], "decay exponent")
            try:
                return sc.decay_symbol(p)
            except sc.SymbolError as exc:
                raise LoweringError(str(exc)) from None
    raise LoweringError(f"cannot lower {node!r}")


def sample(expr: Node | str, opts: LoweringOptions | None = None):
    """Lowered symbol's partial Fourier sum (degrees up to ``band_request``) on ``grid_size`` points."""
    opts = opts or LoweringOptions()
    sym = lower(expr, opts)
    theta = 2 * np.pi * np.arange(opts.grid_size) / opts.grid_size
    if sym.polynomial and sym.band[1] - sym.band[0] < opts.grid_size:
        return theta, sym.on_grid(opts.grid_size)
    B = opts.band_request
    buf = np.zeros(opts.grid_size, dtype=complex)
    for n, v in zip(range(-B, B + 1), sym.coef_range(-B, B)):
        buf[n % opts.grid_size] += v
    return theta, np.fft.ifft(buf) * opts.grid_size

