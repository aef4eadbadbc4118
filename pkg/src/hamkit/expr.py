"""Recursive-descent parser for one-variable nonlinearity expressions.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' factor)?
    base   := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')' | '-' base
    func   := exp | log | sqrt | sin | cos | abs

'^' is right associative and unary minus binds tighter than '^', so
``-x^2`` means ``(-x)^2``. Parsed expressions evaluate elementwise on numpy
arrays.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import HamkitError

__all__ = [
    "Expression",
    "ExpressionError",
    "ExpressionSyntaxError",
    "UnknownIdentifierError",
    "ArityError",
    "parse_expression",
]

FUNCTIONS = {
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "sin": np.sin,
    "cos": np.cos,
    "abs": np.abs,
}
CONSTANTS = {"pi": math.pi, "e": math.e}


class ExpressionError(HamkitError, ValueError):
    def __init__(self, message, source, pos):
        line = source.count("\n", 0, pos) + 1
        column = pos - (source.rfind("\n", 0, pos) + 1) + 1
        super().__init__(f"{message} at line {line}, column {column}")
        self.source = source
        self.pos = pos
        self.line = line
        self.column = column


class ExpressionSyntaxError(ExpressionError):
    pass


class UnknownIdentifierError(ExpressionError):
    pass


class ArityError(ExpressionError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)


def tokenize(src: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {src[pos]!r}", src, pos)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(src)))
    return tokens


# AST nodes are tuples: ("num", v) ("var",) ("neg", a) ("bin", op, a, b) ("call", name, a)


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = tokenize(src)
        self.i = 0
        self.open_parens = []

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, message, tok=None):
        tok = tok or self.tok
        if tok.kind == "end" and self.open_parens:
            raise ExpressionSyntaxError("unclosed '('", self.src, self.open_parens[-1])
        if tok.kind == "end":
            raise ExpressionSyntaxError(f"{message}, found end of input", self.src, tok.pos)
        raise ExpressionSyntaxError(f"{message}, found {tok.text!r}", self.src, tok.pos)

    def accept(self, text):
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def parse(self):
        if self.tok.kind == "end":
            raise ExpressionSyntaxError("empty expression", self.src, 0)
        node = self.expr()
        if self.tok.kind != "end":
            self.fail("expected operator")
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = ("bin", op, node, self.factor())
        return node

    def factor(self):
        node = self.base()
        if self.accept("^"):
            node = ("bin", "^", node, self.factor())
        return node

    def parenthesised(self):
        # current token is '('
        self.open_parens.append(self.tok.pos)
        self.i += 1
        args = [self.expr()]
        while self.accept(","):
            args.append(self.expr())
        if not self.accept(")"):
            self.fail("expected ')'")
        self.open_parens.pop()
        return args

    def base(self):
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return ("num", float(tok.text))
        if tok.kind == "op" and tok.text == "-":
            self.i += 1
            return ("neg", self.base())
        if tok.kind == "op" and tok.text == "(":
            args = self.parenthesised()
            if len(args) != 1:
                raise ExpressionSyntaxError("unexpected ',' in parentheses", self.src, tok.pos)
            return args[0]
        if tok.kind == "name":
            self.i += 1
            if tok.text == "x":
                return ("var",)
            if tok.text in CONSTANTS:
                return ("num", CONSTANTS[tok.text])
            if tok.text in FUNCTIONS:
                if not (self.tok.kind == "op" and self.tok.text == "("):
                    self.fail(f"expected '(' after {tok.text}")
                args = self.parenthesised()
                if len(args) != 1:
                    raise ArityError(f"{tok.text} takes 1 argument, got {len(args)}", self.src, tok.pos)
                return ("call", tok.text, args[0])
            raise UnknownIdentifierError(f"unknown identifier {tok.text!r}", self.src, tok.pos)
        self.fail("expected number, 'x', constant, function or '('")


_BINOPS = {
    "+": np.add,
    "-": np.subtract,
    "*": np.multiply,
    "/": np.true_divide,
    "^": np.power,
}


def _compile(node):
    kind = node[0]
    if kind == "num":
        v = node[1]
        return lambda x: v
    if kind == "var":
        return lambda x: x
    if kind == "neg":
        inner = _compile(node[1])
        return lambda x: np.negative(inner(x))
    if kind == "call":
        fn, inner = FUNCTIONS[node[1]], _compile(node[2])
        return lambda x: fn(inner(x))
    op, left, right = _BINOPS[node[1]], _compile(node[2]), _compile(node[3])
    return lambda x: op(left(x), right(x))


class Expression:
    """Compiled expression in x; call with a float or numpy array."""

    def __init__(self, source: str):
        self.source = source
        self.tree = _Parser(source).parse()
        self._fn = _compile(self.tree)

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(self._fn(arr), dtype=float)
        out = np.broadcast_to(out, arr.shape)
        return float(out) if out.ndim == 0 else out.copy()

    def __repr__(self):
        return f"Expression({self.source!r})"

    def __eq__(self, other):
        return isinstance(other, Expression) and other.source == self.source

    def __hash__(self):
        return hash(self.source)


def parse_expression(src: str) -> Expression:
    return Expression(src)
