"""Strong and weak Boolean semantics on finite trajectories.

Two independent evaluators live here:

* ``eval_strong`` / ``eval_weak`` follow the recursive definitions one
  position at a time (slow, used as the reference);
* ``truth_table`` evaluates a formula at every position of every trajectory
  of a dataset at once with numpy (used by everything that counts).

Positions past the end of a trajectory are all equivalent, so both evaluators
fold them into a single "beyond" position ``L + 1``. Existential quantifiers
may use it only in the weak view and universal quantifiers must respect it
only in the strong view, which keeps the usual dualities exact.
"""

from __future__ import annotations

import numpy as np

from .formula import (
    Always, And, Atom, Eventually, FalseF, Formula, FormulaError, Fragment,
    Next, Not, Or, Release, TrueF, Until, classify, horizon, offsets, state_mask,
)


class FragmentError(FormulaError):
    pass


class HorizonError(FormulaError):
    pass


# ---------------------------------------------------------------- pointwise reference

def _window(k: int, iv, L: int) -> tuple[range, bool]:
    lo, hi = offsets(iv)
    last = L if hi == float("inf") else min(k + int(hi), L)
    return range(k + lo, last + 1), (k + hi > L)


def _holds(strong: bool, s, k: int, f: Formula) -> bool:
    L = len(s.states)
    k = min(k, L + 1)
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Atom):
        if k > L:
            return not strong
        return bool(state_mask(f, s.space)[s.states[k - 1]])
    if isinstance(f, Not):
        return not _holds(not strong, s, k, f.arg)
    if isinstance(f, And):
        return _holds(strong, s, k, f.left) and _holds(strong, s, k, f.right)
    if isinstance(f, Or):
        return _holds(strong, s, k, f.left) or _holds(strong, s, k, f.right)
    if isinstance(f, Next):
        return _holds(strong, s, k + 1, f.arg)
    if isinstance(f, Eventually):
        real, reach = _window(k, f.interval, L)
        if any(_holds(strong, s, j, f.arg) for j in real):
            return True
        return (not strong) and reach and _holds(strong, s, L + 1, f.arg)
    if isinstance(f, Always):
        real, reach = _window(k, f.interval, L)
        if not all(_holds(strong, s, j, f.arg) for j in real):
            return False
        return not (strong and reach) or _holds(strong, s, L + 1, f.arg)
    if isinstance(f, Until):
        real, reach = _window(k, f.interval, L)
        witnesses = list(real) + ([L + 1] if reach and not strong else [])
        for j in witnesses:
            if _holds(strong, s, j, f.right) and all(
                _holds(strong, s, j2, f.left) for j2 in _span(k, j, L)
            ):
                return True
        return False
    if isinstance(f, Release):
        dual = Until(Not(f.left), Not(f.right), f.interval)
        return not _holds(not strong, s, k, dual)
    raise FormulaError(f"cannot evaluate {f!r}")


def _span(k: int, j: int, L: int) -> list[int]:
    if j <= L:
        return list(range(k, j + 1))
    return list(range(k, L + 1)) + [L + 1]


def eval_strong(s, k: int, f: Formula) -> bool:
    """``(s, k) |=_S f`` with 1-based ``k``."""
    if k < 1:
        raise ValueError("time index is 1-based")
    return _holds(True, s, k, f)


def eval_weak(s, k: int, f: Formula) -> bool:
    """``(s, k) |=_W f`` with 1-based ``k``."""
    if k < 1:
        raise ValueError("time index is 1-based")
    return _holds(False, s, k, f)


def _require_length(f: Formula, L: int):
    h = horizon(f)
    if L < h:
        raise HorizonError(f"trajectory length {L} is shorter than the horizon {h} of {f}")


def satisfies(s, f: Formula) -> bool:
    """Satisfaction in the view the formula's fragment calls for.

    Co-safe formulas are read strongly and safe ones weakly. A conjunction or
    disjunction whose parts are decidable but whose combination falls outside
    both fragments is decided part by part.
    """
    frag = classify(f)
    if frag is Fragment.NEITHER:
        if isinstance(f, And):
            return satisfies(s, f.left) and satisfies(s, f.right)
        if isinstance(f, Or):
            return satisfies(s, f.left) or satisfies(s, f.right)
        raise FragmentError(f"{f} is neither syntactically co-safe nor safe")
    _require_length(f, len(s.states))
    if frag is Fragment.SAFE:
        return eval_weak(s, 1, f)
    return eval_strong(s, 1, f)


# ---------------------------------------------------------------- vectorised evaluator

def truth_table(f: Formula, X: np.ndarray, space, strong: bool, _memo=None) -> np.ndarray:
    """Truth of ``f`` at positions ``1..L`` and beyond, for each row of ``X``.

    Returns a boolean array of shape ``(m, L + 1)``; column ``j`` is position
    ``j + 1`` and the last column stands for every position past ``L``.
    """
    memo = {} if _memo is None else _memo
    key = (f, strong)
    if key in memo:
        return memo[key]
    m, L = X.shape
    if isinstance(f, TrueF):
        out = np.ones((m, L + 1), dtype=bool)
    elif isinstance(f, FalseF):
        out = np.zeros((m, L + 1), dtype=bool)
    elif isinstance(f, Atom):
        out = np.empty((m, L + 1), dtype=bool)
        out[:, :L] = state_mask(f, space)[X]
        out[:, L] = not strong
    elif isinstance(f, Not):
        out = ~truth_table(f.arg, X, space, not strong, memo)
    elif isinstance(f, And):
        out = truth_table(f.left, X, space, strong, memo) & truth_table(f.right, X, space, strong, memo)
    elif isinstance(f, Or):
        out = truth_table(f.left, X, space, strong, memo) | truth_table(f.right, X, space, strong, memo)
    elif isinstance(f, Next):
        T = truth_table(f.arg, X, space, strong, memo)
        out = np.concatenate([T[:, 1:], T[:, L:]], axis=1)
    elif isinstance(f, Eventually):
        T = truth_table(f.arg, X, space, strong, memo)
        hits, reach = _window_counts(T, f.interval)
        out = hits > 0
        if not strong:
            out |= reach[None, :] & T[:, L:L + 1]
    elif isinstance(f, Always):
        T = truth_table(f.arg, X, space, strong, memo)
        misses, reach = _window_counts(~T, f.interval)
        out = misses == 0
        if strong:
            out &= ~reach[None, :] | T[:, L:L + 1]
    elif isinstance(f, Until):
        out = _until(truth_table(f.left, X, space, strong, memo),
                     truth_table(f.right, X, space, strong, memo), f.interval, strong)
    elif isinstance(f, Release):
        dual = Until(Not(f.left), Not(f.right), f.interval)
        out = ~truth_table(dual, X, space, not strong, memo)
    else:
        raise FormulaError(f"cannot evaluate {f!r}")
    memo[key] = out
    return out


def _window_counts(T: np.ndarray, iv) -> tuple[np.ndarray, np.ndarray]:
    # count of True over real positions of each window, and whether it reaches past L
    m, L1 = T.shape
    L = L1 - 1
    lo, hi = offsets(iv)
    C = np.zeros((m, L + 1), dtype=np.int64)
    np.cumsum(T[:, :L], axis=1, out=C[:, 1:])
    k = np.arange(L + 1)
    a = np.minimum(k + lo, L)
    b = np.full(L + 1, L - 1) if hi == float("inf") else np.minimum(k + int(hi), L - 1)
    valid = a <= b
    counts = np.where(valid[None, :], C[:, np.maximum(b, a - 1) + 1] - C[:, a], 0)
    reach = (k + hi) >= L
    return counts, reach


def _until(A: np.ndarray, B: np.ndarray, iv, strong: bool) -> np.ndarray:
    m, L1 = A.shape
    L = L1 - 1
    lo, hi = offsets(iv)
    out = np.zeros((m, L1), dtype=bool)
    for k in range(L1):
        run = np.ones(m, dtype=bool)
        last = L if hi == float("inf") else min(k + int(hi), L)
        for j in range(k, L + 1):
            if j == L and (strong or k + hi < L):
                break
            if j > last:
                break
            run &= A[:, j]
            if j >= k + lo or j == L:
                out[:, k] |= run & B[:, j]
    return out


def satisfaction_vector(f: Formula, X: np.ndarray, space) -> np.ndarray:
    """Vectorised ``satisfies`` for every row of ``X``."""
    frag = classify(f)
    if frag is Fragment.NEITHER:
        if isinstance(f, And):
            return satisfaction_vector(f.left, X, space) & satisfaction_vector(f.right, X, space)
        if isinstance(f, Or):
            return satisfaction_vector(f.left, X, space) | satisfaction_vector(f.right, X, space)
        raise FragmentError(f"{f} is neither syntactically co-safe nor safe")
    _require_length(f, X.shape[1])
    strong = frag is not Fragment.SAFE
    return truth_table(f, X, space, strong)[:, 0].copy()
