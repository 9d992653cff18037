"""Tokenizer and parser for polynomial / group-ring expressions.

Grammar::

    expr    := [sign] term (sign term)*
    term    := factor (['*'] factor)*    (juxtaposition only before a variable)
    factor  := number ['i'] | 'i' | '(' expr ')' | var ['^' int]
    var     := x1 .. xd | x | y | z

A parenthesised sub-expression must be a constant (it is how complex
coefficients such as ``(1.5-2i)`` are written).  Variables keep their order
inside a term, so the same parse serves commutative and non-commutative
readings.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import DimensionError, ParseError

ALIASES = {"x": 1, "y": 2, "z": 3}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<var>x\d+|[xyz])
  | (?P<imag>i(?![A-Za-z0-9_]))
  | (?P<op>[-+*^()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Term:
    coeff: complex
    factors: tuple  # ((variable index, exponent), ...) in written order


def tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, tok[2], self.text)

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            raise self.error(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def parse(self):
        terms = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return terms

    def expr(self):
        terms = []
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        while True:
            coeff, factors = self.term()
            terms.append(Term(sign * coeff, factors))
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                sign = -1 if tok[1] == "-" else 1
                continue
            return terms

    def term(self):
        coeff = complex(1)
        factors = []
        while True:
            c, f = self.factor()
            coeff *= c
            if f is not None:
                factors.append(f)
            if self.peek()[1] == "*":
                self.take()
                continue
            if self.peek()[0] == "var":  # juxtaposition: 2x, xy^-1
                continue
            return coeff, tuple(factors)

    def factor(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "num":
            number = float(value)
            if self.peek()[0] == "imag":
                self.take()
                return complex(0, number), None
            return complex(number), None
        if kind == "imag":
            return 1j, None
        if kind == "var":
            index = ALIASES[value] if value in ALIASES else int(value[1:])
            if index < 1:
                raise self.error("variable indices start at 1", tok)
            exponent = 1
            if self.peek()[1] == "^":
                self.take()
                exponent = self.integer()
            return 1, (index, exponent)
        if value == "(":
            start = self.i
            inner = self.expr()
            self.expect(")")
            if any(t.factors for t in inner):
                raise self.error("only constants may appear in parentheses", self.tokens[start])
            return sum((t.coeff for t in inner), complex(0)), None
        raise self.error(f"unexpected {value or 'end of input'!r}", tok)

    def integer(self):
        paren = self.peek()[1] == "("
        if paren:
            self.take()
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        tok = self.take()
        if tok[0] != "num" or not tok[1].isdigit():
            raise self.error("expected an integer exponent", tok)
        if paren:
            self.expect(")")
        return sign * int(tok[1])


def parse_terms(text: str) -> list[Term]:
    """Parse ``text`` into a list of terms (not yet combined)."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0, text)
    return _Parser(text).parse()


def infer_dimension(terms, d: int | None = None) -> int:
    used = max((idx for t in terms for idx, _ in t.factors), default=1)
    if d is None:
        return used
    if used > d:
        raise DimensionError(f"variable x{used} used but dimension is {d}")
    return d
