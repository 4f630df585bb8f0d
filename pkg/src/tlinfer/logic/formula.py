"""pLTL abstract syntax, fragment classification, size and horizon."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import reduce
from typing import Union

import numpy as np

from .space import StateSpace, SpaceError


class FormulaError(ValueError):
    pass


# ---------------------------------------------------------------- intervals

@dataclass(frozen=True)
class Unbounded:
    def __str__(self):
        return ""


@dataclass(frozen=True)
class AtMost:
    i: int

    def __post_init__(self):
        _check_nat(self.i)

    def __str__(self):
        return f"[<={self.i}]"


@dataclass(frozen=True)
class AtLeast:
    i: int

    def __post_init__(self):
        _check_nat(self.i)

    def __str__(self):
        return f"[>={self.i}]"


@dataclass(frozen=True)
class Between:
    i1: int
    i2: int

    def __post_init__(self):
        _check_nat(self.i1)
        _check_nat(self.i2)
        if self.i1 >= self.i2:
            raise FormulaError(f"interval needs i1 < i2, got [{self.i1}, {self.i2}]")

    def __str__(self):
        return f"[>={self.i1},<={self.i2}]"


Interval = Union[Unbounded, AtMost, AtLeast, Between]
UNBOUNDED = Unbounded()


def _check_nat(i):
    if not isinstance(i, (int, np.integer)) or isinstance(i, bool) or i < 0:
        raise FormulaError(f"temporal parameter must be a nonnegative integer, got {i!r}")


def offsets(iv: Interval) -> tuple[int, float]:
    """Relative window ``[lo, hi]`` of an interval; ``hi`` may be ``inf``."""
    if isinstance(iv, AtMost):
        return 0, iv.i
    if isinstance(iv, AtLeast):
        return iv.i, float("inf")
    if isinstance(iv, Between):
        return iv.i1, iv.i2
    return 0, float("inf")


def bounded(iv: Interval) -> bool:
    return isinstance(iv, (AtMost, Between))


# ---------------------------------------------------------------- AST

class Formula:
    """Base class of the immutable formula AST (nodes are frozen dataclasses)."""

    def __str__(self):
        from .parser import to_string
        return to_string(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, eq=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True, eq=True)
class FalseF(Formula):
    pass


TRUE = TrueF()
FALSE = FalseF()


class Rel(str, enum.Enum):
    GE = ">="
    LE = "<="
    EQ = "="


@dataclass(frozen=True)
class Atom(Formula):
    variable: str
    rel: Rel
    threshold: Union[int, str]

    def __post_init__(self):
        object.__setattr__(self, "rel", Rel(self.rel))

    def holds(self, value) -> bool:
        if self.rel is Rel.GE:
            return value >= self.threshold
        if self.rel is Rel.LE:
            return value <= self.threshold
        return value == self.threshold

    def check(self, space: StateSpace):
        try:
            var = space.variable(self.variable)
        except SpaceError as e:
            raise FormulaError(str(e)) from None
        if var.categorical and self.rel is not Rel.EQ:
            raise FormulaError(f"{self.variable} is categorical; only '=' is allowed")
        if not var.categorical and self.rel is Rel.EQ:
            raise FormulaError(f"{self.variable} is numeric; use '>=' or '<='")
        if not var.contains(self.threshold):
            raise FormulaError(f"threshold {self.threshold!r} outside the domain of {self.variable}")


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula
    interval: Interval = UNBOUNDED


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula
    interval: Interval = UNBOUNDED


@dataclass(frozen=True)
class Eventually(Formula):
    interval: Interval
    arg: Formula


@dataclass(frozen=True)
class Always(Formula):
    interval: Interval
    arg: Formula


def UntilI(interval, left, right):
    return Until(left, right, interval)


def ReleaseI(interval, left, right):
    return Release(left, right, interval)


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def conj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    return reduce(And, parts)


def disj(parts) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    return reduce(Or, parts)


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, (Not, Next, Eventually, Always)):
        return (f.arg,)
    if isinstance(f, (And, Or, Until, Release)):
        return (f.left, f.right)
    return ()


def atoms(f: Formula) -> set[Atom]:
    if isinstance(f, Atom):
        return {f}
    out = set()
    for c in children(f):
        out |= atoms(c)
    return out


def check(f: Formula, space: StateSpace) -> Formula:
    for a in atoms(f):
        a.check(space)
    return f


# ---------------------------------------------------------------- measures

def size(f: Formula) -> int:
    """Number of Boolean connectives (``And``/``Or`` nodes)."""
    own = 1 if isinstance(f, (And, Or)) else 0
    return own + sum(size(c) for c in children(f))


def is_state_formula(f: Formula) -> bool:
    """True when ``f`` contains no temporal operator."""
    if isinstance(f, (Next, Until, Release, Eventually, Always)):
        return False
    return all(is_state_formula(c) for c in children(f))


def horizon(f: Formula) -> int:
    """Trajectory length needed for a prefix to decide ``f`` at time 1.

    Atoms need one position; a window ``[lo, hi]`` adds ``hi`` (``lo`` for
    half-open windows); unbounded operators add nothing beyond the trajectory.
    """
    if isinstance(f, Atom):
        return 1
    if isinstance(f, (TrueF, FalseF)):
        return 0
    if isinstance(f, (Not, And, Or)):
        return max(horizon(c) for c in children(f))
    if isinstance(f, Next):
        return 1 + horizon(f.arg)
    lo, hi = offsets(f.interval)
    reach = lo if hi == float("inf") else hi
    return int(reach) + max(horizon(c) for c in children(f))


# ---------------------------------------------------------------- NNF and fragments

def negate(f: Formula) -> Formula:
    """Negation pushed one level using the standard dualities."""
    if isinstance(f, TrueF):
        return FALSE
    if isinstance(f, FalseF):
        return TRUE
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Not):
        return f.arg
    if isinstance(f, And):
        return Or(Not(f.left), Not(f.right))
    if isinstance(f, Or):
        return And(Not(f.left), Not(f.right))
    if isinstance(f, Next):
        return Next(Not(f.arg))
    if isinstance(f, Eventually):
        return Always(f.interval, Not(f.arg))
    if isinstance(f, Always):
        return Eventually(f.interval, Not(f.arg))
    if isinstance(f, Until):
        return Release(Not(f.left), Not(f.right), f.interval)
    if isinstance(f, Release):
        return Until(Not(f.left), Not(f.right), f.interval)
    raise FormulaError(f"cannot negate {f!r}")


def nnf(f: Formula) -> Formula:
    """Negation normal form: ``Not`` only directly above atoms."""
    if isinstance(f, Not):
        inner = f.arg
        if isinstance(inner, Atom):
            return f
        return nnf(negate(inner))
    if isinstance(f, (And, Or)):
        return type(f)(nnf(f.left), nnf(f.right))
    if isinstance(f, (Next,)):
        return Next(nnf(f.arg))
    if isinstance(f, (Eventually, Always)):
        return type(f)(f.interval, nnf(f.arg))
    if isinstance(f, (Until, Release)):
        return type(f)(nnf(f.left), nnf(f.right), f.interval)
    return f


class Fragment(enum.Enum):
    COSAFE = "co-safe"
    SAFE = "safe"
    BOTH = "both"
    NEITHER = "neither"


def _membership(f: Formula) -> tuple[bool, bool]:
    # (co-safe, safe) for an NNF formula
    if isinstance(f, (TrueF, FalseF, Atom)):
        return True, True
    if isinstance(f, Not):
        return True, True
    if isinstance(f, (And, Or, Next)):
        parts = [_membership(c) for c in children(f)]
        return all(p[0] for p in parts), all(p[1] for p in parts)
    parts = [_membership(c) for c in children(f)]
    cs, sf = all(p[0] for p in parts), all(p[1] for p in parts)
    iv = f.interval
    if bounded(iv):
        return cs, sf
    # unbounded or lower-bounded windows
    if isinstance(f, (Eventually, Until)):
        return cs, False
    return False, sf


def classify(f: Formula) -> Fragment:
    cs, sf = _membership(nnf(f))
    if cs and sf:
        return Fragment.BOTH
    if cs:
        return Fragment.COSAFE
    if sf:
        return Fragment.SAFE
    return Fragment.NEITHER


# ---------------------------------------------------------------- state masks

def state_mask(f: Formula, space: StateSpace) -> np.ndarray:
    """Boolean vector over ``space.states`` for a temporal-free formula."""
    if isinstance(f, TrueF):
        return np.ones(len(space), dtype=bool)
    if isinstance(f, FalseF):
        return np.zeros(len(space), dtype=bool)
    if isinstance(f, Atom):
        return _atom_mask(f, space)
    if isinstance(f, Not):
        return ~state_mask(f.arg, space)
    if isinstance(f, And):
        return state_mask(f.left, space) & state_mask(f.right, space)
    if isinstance(f, Or):
        return state_mask(f.left, space) | state_mask(f.right, space)
    raise FormulaError(f"not a state formula: {f}")


_MASKS: dict = {}


def _atom_mask(a: Atom, space: StateSpace) -> np.ndarray:
    key = (a, space)
    m = _MASKS.get(key)
    if m is None:
        a.check(space)
        col = space.column(a.variable)
        if a.rel is Rel.GE:
            m = col >= a.threshold
        elif a.rel is Rel.LE:
            m = col <= a.threshold
        else:
            m = col == a.threshold
        m = np.asarray(m, dtype=bool)
        m.setflags(write=False)
        _MASKS[key] = m
    return m
