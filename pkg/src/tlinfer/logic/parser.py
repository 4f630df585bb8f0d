"""Recursive-descent parser and printer for the ASCII formula syntax.

Grammar (lowest to highest precedence)::

    formula  := disj ('->' formula)?
    disj     := conj ('|' conj)*
    conj     := binary ('&' binary)*
    binary   := unary (('U' | 'R') interval? binary)?
    unary    := '!' unary | 'X' unary | ('F' | 'G') interval? unary | primary
    primary  := 'true' | 'false' | atom | '(' formula ')'
    atom     := IDENT ('>=' | '<=' | '=') (INT | IDENT)
    interval := '[' ( '<=' INT | '>=' INT (',' '<=' INT)? ) ']'
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .formula import (
    FALSE, TRUE, AtLeast, AtMost, Atom, Always, And, Between, Eventually,
    FalseF, Formula, FormulaError, Next, Not, Or, Release, Rel, TrueF,
    UNBOUNDED, Unbounded, Until, check,
)
from .space import StateSpace


class ParseError(FormulaError):
    def __init__(self, msg: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        pointer = f"\n  {text}\n  {' ' * pos}^" if text else ""
        super().__init__(f"{msg} at position {pos}{pointer}")


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op>->|>=|<=|=|&|\||!|\(|\)|\[|\]|,)
  | (?P<int>-?\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
""", re.VERBOSE)

_RELS = {">=", "<=", "="}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, space: StateSpace | None):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.space = space

    # -- helpers
    def peek(self, k=0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.peek()
        if t.text != text or t.kind not in ("op", "ident"):
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.pos, self.text)
        return self.take()

    def fail(self, msg: str):
        raise ParseError(msg, self.peek().pos, self.text)

    def is_atom_start(self) -> bool:
        return self.peek().kind == "ident" and self.peek(1).text in _RELS

    def keyword(self, *words) -> bool:
        t = self.peek()
        return t.kind == "ident" and t.text in words and not self.is_atom_start()

    # -- grammar
    def formula(self) -> Formula:
        left = self.disj()
        if self.peek().text == "->":
            self.take()
            return Or(Not(left), self.formula())
        return left

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek().text == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.binary()
        while self.peek().text == "&":
            self.take()
            f = And(f, self.binary())
        return f

    def binary(self) -> Formula:
        left = self.unary()
        if self.keyword("U", "R"):
            op = self.take().text
            iv = self.interval()
            right = self.binary()
            cls = Until if op == "U" else Release
            return cls(left, right, iv)
        return left

    def unary(self) -> Formula:
        t = self.peek()
        if t.text == "!":
            self.take()
            return Not(self.unary())
        if self.keyword("X"):
            self.take()
            return Next(self.unary())
        if self.keyword("F", "G"):
            op = self.take().text
            iv = self.interval()
            arg = self.unary()
            return Eventually(iv, arg) if op == "F" else Always(iv, arg)
        return self.primary()

    def primary(self) -> Formula:
        t = self.peek()
        if t.text == "(":
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if self.is_atom_start():
            return self.atom()
        if t.kind == "ident" and t.text == "true":
            self.take()
            return TRUE
        if t.kind == "ident" and t.text == "false":
            self.take()
            return FALSE
        if t.kind == "eof":
            self.fail("unexpected end of input")
        self.fail(f"unexpected token {t.text!r}")

    def atom(self) -> Formula:
        name = self.take()
        rel = self.take().text
        val = self.take()
        if val.kind not in ("int", "ident"):
            raise ParseError(f"expected a threshold, found {val.text!r}", val.pos, self.text)
        thr = self._threshold(name.text, val)
        a = Atom(name.text, Rel(rel), thr)
        if self.space is not None:
            try:
                a.check(self.space)
            except FormulaError as e:
                raise ParseError(str(e), name.pos, self.text) from None
        return a

    def _threshold(self, var: str, tok: Token):
        if self.space is not None:
            try:
                categorical = self.space.variable(var).categorical
            except Exception:
                raise ParseError(f"unknown variable {var!r}", tok.pos, self.text) from None
            if categorical:
                return tok.text
        return int(tok.text) if tok.kind == "int" else tok.text

    def interval(self):
        if self.peek().text != "[":
            return UNBOUNDED
        start = self.take().pos
        rel = self.take()
        if rel.text not in ("<=", ">="):
            raise ParseError("interval bound must start with '<=' or '>='", rel.pos, self.text)
        first = self._nat()
        if rel.text == "<=":
            self.expect("]")
            return AtMost(first)
        if self.peek().text == ",":
            self.take()
            self.expect("<=")
            second = self._nat()
            self.expect("]")
            if first >= second:
                raise ParseError(f"interval needs i1 < i2, got [{first}, {second}]", start, self.text)
            return Between(first, second)
        self.expect("]")
        return AtLeast(first)

    def _nat(self) -> int:
        t = self.take()
        if t.kind != "int" or int(t.text) < 0:
            raise ParseError(f"expected a nonnegative integer, found {t.text!r}", t.pos, self.text)
        return int(t.text)


def parse(text: str, space: StateSpace | None = None) -> Formula:
    """Parse ``text``; with ``space`` given, atoms are validated against it."""
    p = _Parser(text, space)
    f = p.formula()
    if p.peek().kind != "eof":
        p.fail(f"unexpected trailing input {p.peek().text!r}")
    if space is not None:
        check(f, space)
    return f


# ---------------------------------------------------------------- printing

def _iv(iv) -> str:
    return "" if isinstance(iv, Unbounded) else str(iv)


def _bare(f: Formula) -> str:
    # '&' and '|' parse left-associatively, so a left-nested chain needs no parentheses
    if isinstance(f, (And, Or)):
        op = " & " if isinstance(f, And) else " | "
        left = _bare(f.left) if type(f.left) is type(f) else _operand(f.left)
        return f"{left}{op}{_operand(f.right)}"
    if isinstance(f, (Until, Release)):
        op = "U" if isinstance(f, Until) else "R"
        return f"{_operand(f.left)} {op}{_iv(f.interval)} {_operand(f.right)}"
    return _operand(f)


def _operand(f: Formula) -> str:
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Atom):
        return f"{f.variable}{f.rel.value}{f.threshold}"
    if isinstance(f, Not):
        return "!" + _operand(f.arg)
    if isinstance(f, Next):
        return "X" + _operand(f.arg) if isinstance(f.arg, (And, Or, Until, Release)) else f"X({_operand(f.arg)})"
    if isinstance(f, (Eventually, Always)):
        op = "F" if isinstance(f, Eventually) else "G"
        return f"{op}{_iv(f.interval)}({_bare(f.arg)})"
    if isinstance(f, (And, Or, Until, Release)):
        return f"({_bare(f)})"
    raise FormulaError(f"cannot print {f!r}")


def to_string(f: Formula) -> str:
    """ASCII text that ``parse`` maps back to ``f``."""
    return _bare(f)
