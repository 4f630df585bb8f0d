"""Counter automata for primitive (co-)safe formulas and their DTMC products.

Every automaton reads concrete system states: the transition table is indexed
by ``(dfa_state, state_index)``, i.e. the labelling function is already
composed into ``delta``. Acceptance means strong satisfaction of the formula
when it is co-safe, and strong satisfaction of its negation when it is only
safe (``Dfa.negated`` records which).

Supported shapes, with ``p`` any temporal-free predicate::

    p                          F_I p        G_I p
    G F[<=i] p                 F G[<=i] p
    G(c -> F_I p)              G(c -> G_I p)
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable

import numpy as np

from .logic.formula import (
    AtMost, Always, Eventually, Formula, FormulaError, Fragment, Not, Or,
    TRUE, Unbounded, classify, is_state_formula, nnf, offsets, state_mask,
)
from .logic.space import StateSpace


class UnsupportedFormula(FormulaError):
    pass


class AlphabetError(ValueError):
    pass


ACCEPT = "acc"
REJECT = "rej"


@dataclass(frozen=True, eq=False)
class Dfa:
    space: StateSpace
    delta: np.ndarray               # (n_states, |S|) successor indices
    accepting: np.ndarray           # (n_states,) bool
    labels: tuple[str, ...]
    negated: bool = False           # accepts strong satisfaction of the negation
    formula: Formula | None = None
    initial: int = 0

    def __post_init__(self):
        for arr in (self.delta, self.accepting):
            arr.setflags(write=False)

    @property
    def n_states(self) -> int:
        return self.delta.shape[0]

    def step(self, q: int, symbol: int) -> int:
        if not 0 <= symbol < self.delta.shape[1]:
            raise AlphabetError(f"symbol {symbol} outside the alphabet")
        return int(self.delta[q, symbol])

    def dump(self) -> str:
        """Plain-text transition table grouped by predicate class."""
        lines = [f"# DFA for {'!' if self.negated else ''}{self.formula}",
                 f"# states={self.n_states} initial={self.labels[self.initial]}"]
        for q in range(self.n_states):
            tag = " (accepting)" if self.accepting[q] else ""
            succ: dict[int, list[int]] = {}
            for sym, nq in enumerate(self.delta[q]):
                succ.setdefault(int(nq), []).append(sym)
            parts = []
            for nq, syms in sorted(succ.items()):
                shown = ",".join(_fmt_state(self.space.states[s]) for s in syms[:4])
                more = f",... ({len(syms)} states)" if len(syms) > 4 else ""
                parts.append(f"{self.labels[nq]} <- {{{shown}{more}}}")
            lines.append(f"{self.labels[q]}{tag}: " + "; ".join(parts))
        return "\n".join(lines)


def _fmt_state(s: tuple) -> str:
    return s[0].__str__() if len(s) == 1 else "(" + " ".join(map(str, s)) + ")"


def dfa_run(a: Dfa, s) -> bool:
    """Feed a trajectory (or a sequence of state indices) through ``a``."""
    states = getattr(s, "states", s)
    q = a.initial
    for sym in states:
        q = a.step(q, int(sym))
    return bool(a.accepting[q])


def dfa_run_many(a: Dfa, X: np.ndarray) -> np.ndarray:
    """Vectorised ``dfa_run`` over the rows of an ``(m, L)`` index array."""
    if X.size and (X.min() < 0 or X.max() >= a.delta.shape[1]):
        raise AlphabetError("symbol outside the alphabet")
    q = np.full(X.shape[0], a.initial, dtype=np.int64)
    for t in range(X.shape[1]):
        q = a.delta[q, X[:, t]]
    return a.accepting[q]


# ---------------------------------------------------------------- construction

def _explore(init: Hashable, step: Callable[[Hashable, int], Hashable],
             n_classes: int, accepting: Callable[[Hashable], bool],
             label: Callable[[Hashable], str]):
    # breadth-first enumeration of reachable states over predicate classes
    index = {init: 0}
    order = [init]
    table = []
    queue = deque([init])
    while queue:
        st = queue.popleft()
        row = []
        for c in range(n_classes):
            nxt = step(st, c)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            row.append(index[nxt])
        table.append(row)
    # rows were appended in discovery order, which matches ``order``
    table = np.array(table, dtype=np.int64)
    acc = np.array([accepting(st) for st in order], dtype=bool)
    return table, acc, tuple(label(st) for st in order)


def _expand(table: np.ndarray, classes: np.ndarray) -> np.ndarray:
    # class-level table -> per-state table
    return np.ascontiguousarray(table[:, classes])


def window_dfa(space: StateSpace, pred: Formula, lo: int, hi: float,
               universal: bool) -> tuple[np.ndarray, np.ndarray, tuple]:
    """Counter automaton for ``F_[lo,hi] pred`` or ``G_[lo,hi] pred`` at time 1.

    States count consumed symbols up to the end of the window (or up to its
    start when it is unbounded above), plus absorbing accept/reject traps.
    ``universal`` requires finite ``hi``.
    """
    mask = state_mask(pred, space)
    last = lo if hi == float("inf") else int(hi)  # highest counter value kept

    def step(n, c):
        if n in (ACCEPT, REJECT):
            return n
        in_window = n >= lo
        ok = bool(c)
        if universal:
            if in_window and not ok:
                return REJECT
            if n == last:
                return ACCEPT
            return n + 1
        if in_window and ok:
            return ACCEPT
        if n == last and hi != float("inf"):
            return REJECT
        return min(n + 1, last)

    table, acc, labels = _explore(0, step, 2, lambda n: n == ACCEPT,
                                  lambda n: n if isinstance(n, str) else f"t{n}")
    return _expand(table, mask.astype(np.int64)), acc, labels


def response_violation_dfa(space: StateSpace, cause: Formula, effect_pred: Formula,
                           lo: int, hi: float, universal: bool):
    """Automaton accepting strong violations of ``G(cause -> E)``.

    ``E`` is ``F_[lo,hi] effect_pred`` (``universal=False``) or
    ``G_[lo,hi] effect_pred``. The state is the set of ages of pending
    obligations, reduced to the members that can still matter.
    """
    c_mask = state_mask(cause, space)
    r_mask = state_mask(effect_pred, space)
    inf = hi == float("inf")
    if not universal and inf:
        raise UnsupportedFormula("G(c -> F[>=i] p) is not safe")

    def canon(ages: frozenset) -> frozenset:
        if not ages:
            return ages
        if universal:
            if inf:
                return frozenset({min(max(ages), lo)})
            if lo == 0:
                return frozenset({min(ages)})
            return ages
        if lo == 0:
            return frozenset({max(ages)})
        return ages

    def step(st, c):
        if st == ACCEPT:
            return st
        cause_now, ok = bool(c & 2), bool(c & 1)
        ages = set(st)
        if cause_now:
            ages.add(0)
        if universal:
            active = [a for a in ages if a >= lo and a <= hi]
            if active and not ok:
                return ACCEPT
            nxt = {a + 1 for a in ages if a + 1 <= hi} if not inf else {a + 1 for a in ages}
        else:
            if ok:
                ages = {a for a in ages if a < lo}
            if any(a >= hi for a in ages):
                return ACCEPT
            nxt = {a + 1 for a in ages}
        return canon(frozenset(nxt))

    def label(st):
        if st == ACCEPT:
            return ACCEPT
        return "w" + ",".join(map(str, sorted(st))) if st else "idle"

    table, acc, labels = _explore(frozenset(), step, 4, lambda st: st == ACCEPT, label)
    classes = c_mask.astype(np.int64) * 2 + r_mask.astype(np.int64)
    return _expand(table, classes), acc, labels


def _match(f: Formula):
    """Recognise a supported primitive shape in an NNF formula.

    Returns ``(kind, data)`` or raises ``UnsupportedFormula``.
    """
    if is_state_formula(f):
        return "state", (f,)
    if isinstance(f, (Eventually, Always)) and is_state_formula(f.arg):
        return ("F" if isinstance(f, Eventually) else "G"), (f.interval, f.arg)
    if isinstance(f, Always) and isinstance(f.interval, Unbounded):
        body = f.arg
        if isinstance(body, (Eventually, Always)) and is_state_formula(body.arg):
            return "GF", (TRUE, body)
        if isinstance(body, Or):
            for c, e in ((body.left, body.right), (body.right, body.left)):
                if is_state_formula(c) and isinstance(e, (Eventually, Always)) and is_state_formula(e.arg):
                    return "GF", (nnf(Not(c)), e)
    if isinstance(f, Eventually) and isinstance(f.interval, Unbounded):
        body = f.arg
        if isinstance(body, Always) and isinstance(body.interval, AtMost) and is_state_formula(body.arg):
            return "FG", (body,)
    raise UnsupportedFormula(f"no automaton construction for {f}")


def build_dfa(f: Formula, space: StateSpace) -> Dfa:
    """Acceptor of the finite prefixes that decide a primitive formula.

    For a co-safe ``f`` the automaton accepts trajectories strongly satisfying
    ``f``; for a formula that is only safe it accepts those strongly
    satisfying ``!f``.
    """
    g = nnf(f)
    frag = classify(g)
    if frag is Fragment.NEITHER:
        raise UnsupportedFormula(f"{f} is neither co-safe nor safe")
    negated = frag is Fragment.SAFE
    kind, data = _match(g)
    if kind == "state":
        (p,) = data
        delta, acc, labels = window_dfa(space, nnf(Not(p)) if negated else p, 0, 0, False)
    elif kind in ("F", "G"):
        iv, p = data
        lo, hi = offsets(iv)
        universal = kind == "G"
        if negated:
            # strong violation of G_I p is strong satisfaction of F_I !p, and dually
            p, universal = nnf(Not(p)), not universal
        delta, acc, labels = window_dfa(space, p, lo, hi, universal)
    elif kind == "GF":
        cause, effect = data
        lo, hi = offsets(effect.interval)
        delta, acc, labels = response_violation_dfa(
            space, cause, effect.arg, lo, hi, isinstance(effect, Always))
    else:  # "FG": F G[<=i] p is violated-G F[<=i] !p
        (body,) = data
        delta, acc, labels = response_violation_dfa(
            space, TRUE, nnf(Not(body.arg)), 0, body.interval.i, False)
    return Dfa(space, delta, acc, labels, negated=negated, formula=f)


# ---------------------------------------------------------------- product with a DTMC

@dataclass(frozen=True, eq=False)
class ProductAutomaton:
    """Synchronous product of a DTMC and a DFA over states ``(s, q)``.

    Product state ``(s, q)`` has index ``s * n_q + q``. The initial
    distribution has already consumed the first trajectory state.
    """

    dfa: Dfa
    P: np.ndarray            # (H*Q, H*Q) transition matrix
    init: np.ndarray         # (H*Q,) initial distribution
    accepting: np.ndarray    # (H*Q,) bool

    @property
    def n_q(self) -> int:
        return self.dfa.n_states

    def index(self, s: int, q: int) -> int:
        return s * self.n_q + q

    @property
    def states(self) -> list[tuple[int, int]]:
        H = self.P.shape[0] // self.n_q
        return [(s, q) for s in range(H) for q in range(self.n_q)]


def product(m, a: Dfa) -> ProductAutomaton:
    """Build the product of a ``Dtmc`` (``prob.Dtmc``) with ``a``."""
    if m.space != a.space:
        raise AlphabetError("DFA alphabet differs from the DTMC state set")
    H, Q = len(m.space), a.n_states
    P = np.zeros((H * Q, H * Q))
    s_idx, q_idx, s2_idx = np.meshgrid(np.arange(H), np.arange(Q), np.arange(H), indexing="ij")
    rows = s_idx * Q + q_idx
    cols = s2_idx * Q + a.delta[q_idx, s2_idx]
    P[rows.ravel(), cols.ravel()] = m.P[s_idx, s2_idx].ravel()
    init = np.zeros(H * Q)
    init[np.arange(H) * Q + a.delta[a.initial, np.arange(H)]] = m.p_init
    acc = np.tile(a.accepting, H)
    return ProductAutomaton(a, P, init, acc)
