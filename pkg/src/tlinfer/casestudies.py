"""Synthetic data sets: anomalies in a birth-death chain, a changed chain, and
a grid world with scripted responses.

Anomalies are injected by sampling the chain conditioned on window
constraints (a backward pass computes, for every time and state, the
probability that the remaining constraints can still be met; the forward
pass samples from the reweighted kernel). This gives the law of whole-path
rejection sampling while using one uniform per time step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .logic.formula import Atom, Formula, Rel, conj, state_mask
from .logic.space import StateSpace
from .prob import Dtmc, Stationary, uniforms, substreams
from .trajectory import Dataset
from .optimize import rectangle


class InfeasibleConstraint(ValueError):
    pass


# ---------------------------------------------------------------- birth-death chain

@dataclass(frozen=True)
class ChainParams:
    """Transition probabilities of the birth-death chain on ``1..n``.

    Interior states step down, stay, or step up with ``p_down``, ``p_stay``,
    ``p_up``. State 1 stays with ``hat_stay`` and steps up with ``hat_up``;
    state ``n`` stays with ``hat_stay`` and steps down with ``hat_down``.
    """

    p_stay: float = 1 / 3
    p_down: float = 1 / 3
    p_up: float = 1 / 3
    hat_stay: float = 0.5
    hat_up: float = 0.5
    hat_down: float = 0.5
    n: int = 10

    def __post_init__(self):
        for total, what in ((self.p_stay + self.p_down + self.p_up, "interior"),
                            (self.hat_stay + self.hat_up, "lower boundary"),
                            (self.hat_stay + self.hat_down, "upper boundary")):
            if abs(total - 1) > 1e-12:
                raise ValueError(f"{what} probabilities sum to {total}")
        if self.n < 2:
            raise ValueError("chain needs at least two states")


def chain_space(n: int = 10) -> StateSpace:
    return StateSpace.of(numeric={"x": (1, n)})


def birth_death_chain(c: ChainParams = ChainParams()) -> Dtmc:
    n = c.n
    P = np.zeros((n, n))
    for i in range(1, n - 1):
        P[i, i - 1], P[i, i], P[i, i + 1] = c.p_down, c.p_stay, c.p_up
    P[0, 0], P[0, 1] = c.hat_stay, c.hat_up
    P[n - 1, n - 1], P[n - 1, n - 2] = c.hat_stay, c.hat_down
    return Dtmc(chain_space(n), np.full(n, 1.0 / n), P)


CASE2_PRESENT = ChainParams(p_stay=0.2, p_down=0.6, p_up=0.2)
CASE2_PRIOR_A = ChainParams()
CASE2_PRIOR_B = ChainParams(p_stay=0.05, p_down=0.9, p_up=0.05)


# ---------------------------------------------------------------- conditioned sampling

@dataclass(frozen=True)
class Window:
    """Constraint on time indices ``start..end`` (1-based, inclusive).

    ``mode="all"``: every state in the window satisfies ``pred``;
    ``mode="any"``: at least one does.
    """

    start: int
    end: int
    pred: Formula
    mode: str = "all"

    def __post_init__(self):
        if not 1 <= self.start <= self.end:
            raise ValueError(f"bad window [{self.start}, {self.end}]")
        if self.mode not in ("all", "any"):
            raise ValueError("mode must be 'all' or 'any'")


def _rules(space: StateSpace, L: int, windows: Sequence[Window]):
    # per time step: (alive[f, s], next_flag[f, s]) for flag f in {0, 1}
    H = len(space)
    free = (np.ones((2, H), dtype=bool), np.zeros((2, H), dtype=np.int64))
    rules = [free] * (L + 1)
    taken = np.zeros(L + 2, dtype=bool)
    for w in windows:
        if w.end > L:
            raise ValueError(f"window [{w.start}, {w.end}] exceeds L={L}")
        if taken[w.start:w.end + 1].any():
            raise ValueError("constraint windows must not overlap")
        taken[w.start:w.end + 1] = True
        mask = state_mask(w.pred, space)
        for t in range(w.start, w.end + 1):
            if w.mode == "all":
                rules[t] = (np.tile(mask, (2, 1)), np.zeros((2, H), dtype=np.int64))
            else:
                carried = np.array([[0], [0 if t == w.start else 1]])
                nf = (carried | mask[None, :]).astype(np.int64)
                alive = nf == 1 if t == w.end else np.ones((2, H), dtype=bool)
                rules[t] = (alive, nf)
    return rules


def conditioned_paths(m: Dtmc, L: int, windows: Sequence[Window], U: np.ndarray) -> np.ndarray:
    """Paths of ``m`` conditioned on ``windows``, driven by uniforms ``U`` (n, L)."""
    H = len(m.space)
    rules = _rules(m.space, L, windows)
    h = np.ones((L + 1, H, 2))
    for t in range(L - 1, 0, -1):
        alive, nf = rules[t + 1]
        for f in (0, 1):
            g = alive[f] * h[t + 1][np.arange(H), nf[f]]
            h[t][:, f] = m.P @ g
        top = h[t].max()
        if top > 0:
            h[t] /= top
    n = U.shape[0]
    X = np.empty((n, L), dtype=np.int64)
    flags = np.zeros(n, dtype=np.int64)
    cols = np.arange(H)
    for t in range(1, L + 1):
        alive, nf = rules[t]
        base = np.broadcast_to(m.p_init, (n, H)) if t == 1 else m.P[X[:, t - 2]]
        W = base * alive[flags] * h[t][cols[None, :], nf[flags]]
        tot = W.sum(axis=1)
        if (tot <= 0).any():
            raise InfeasibleConstraint("constraints have probability zero under the chain")
        cs = np.cumsum(W, axis=1)
        cdf = cs / cs[:, -1:]
        idx = np.minimum((U[:, t - 1][:, None] >= cdf).sum(axis=1), H - 1)
        X[:, t - 1] = idx
        flags = nf[flags, idx]
    return X


# ---------------------------------------------------------------- Case I

@dataclass(frozen=True)
class AnomalySpec:
    """Which trajectories receive which window constraints.

    ``groups`` maps a half-open trajectory range ``(first, last)`` (0-based)
    to the windows imposed on it; ranges may overlap, in which case the
    windows of both apply.
    """

    n: int = 100
    L: int = 100
    groups: tuple = field(default_factory=lambda: (
        ((0, 60), (Window(1, 5, Atom("x", Rel.LE, 2), "any"),
                   Window(51, 52, Atom("x", Rel.GE, 9), "all"))),
        ((40, 100), (Window(71, 80, Atom("x", Rel.LE, 2), "any"),)),
    ))

    def windows_for(self, j: int) -> tuple[Window, ...]:
        out = []
        for (a, b), ws in self.groups:
            if a <= j < b:
                out.extend(ws)
        return tuple(sorted(out, key=lambda w: w.start))


def simulate_anomalies(m: Dtmc, spec: AnomalySpec = AnomalySpec(), seed: int = 0) -> Dataset:
    """Chain trajectories with the constraints of ``spec`` injected."""
    if spec.n < 1 or spec.L < 1:
        raise ValueError("need n >= 1 and L >= 1")
    U = uniforms(seed, spec.n, spec.L)
    X = np.empty((spec.n, spec.L), dtype=np.int64)
    by_windows: dict[tuple, list[int]] = {}
    for j in range(spec.n):
        by_windows.setdefault(spec.windows_for(j), []).append(j)
    for ws, rows in by_windows.items():
        X[rows] = conditioned_paths(m, spec.L, ws, U[rows])
    return Dataset(m.space, X)


def case1(seed: int = 0, spec: AnomalySpec = AnomalySpec()) -> tuple[Dtmc, Dataset]:
    """Prior chain and anomalous data set."""
    m = birth_death_chain()
    return m, simulate_anomalies(m, spec, seed)


def case2(scenario: str = "a", n: int = 100, L: int = 100, seed: int = 0) -> tuple[Dtmc, Dataset]:
    """Data from the present-day chain and the prior of scenario ``a`` or ``b``."""
    prior = {"a": CASE2_PRIOR_A, "b": CASE2_PRIOR_B}.get(scenario)
    if prior is None:
        raise ValueError("scenario must be 'a' or 'b'")
    present = birth_death_chain(CASE2_PRESENT)
    return birth_death_chain(prior), simulate_anomalies(present, AnomalySpec(n, L, ()), seed)


# ---------------------------------------------------------------- grid world

BELIEFS = ("bank_1", "bank_2", "bank_3")


def grid_space(size: int = 8, beliefs: Sequence[str] = BELIEFS) -> StateSpace:
    return StateSpace.of(numeric={"x": (1, size), "y": (1, size)}, categorical={"b": tuple(beliefs)})


@dataclass(frozen=True)
class Rect:
    x1: int
    x2: int
    y1: int
    y2: int

    def formula(self) -> Formula:
        return rectangle("x", self.x1, self.x2, "y", self.y1, self.y2)

    def contains(self, x, y):
        return (self.x1 <= x) & (x <= self.x2) & (self.y1 <= y) & (y <= self.y2)

    def overlaps(self, other: "Rect") -> bool:
        return not (self.x2 < other.x1 or other.x2 < self.x1 or self.y2 < other.y1 or other.y2 < self.y1)


@dataclass(frozen=True)
class Response:
    """When belief is ``belief`` and the agent enters ``cause``, it reaches
    ``target`` after one or two steps (equally likely)."""

    belief: str
    cause: Rect
    target: Rect

    def cause_formula(self) -> Formula:
        return conj([self.cause.formula(), Atom("b", Rel.EQ, self.belief)])


DEFAULT_RESPONSES = (
    Response("bank_1", Rect(3, 4, 5, 6), Rect(5, 6, 7, 8)),
    Response("bank_2", Rect(5, 6, 5, 6), Rect(3, 4, 7, 8)),
    Response("bank_3", Rect(3, 4, 7, 8), Rect(5, 6, 5, 6)),
)


@dataclass(frozen=True)
class GridSpec:
    n: int = 60
    L: int = 30
    size: int = 8
    responses: tuple[Response, ...] = DEFAULT_RESPONSES


def simulate_grid(spec: GridSpec = GridSpec(), seed: int = 0) -> Dataset:
    """Uniformly wandering agent with scripted cause/target responses.

    Trajectory ``j`` keeps belief ``BELIEFS[j % 3]`` throughout. Outside the
    scripted responses every position is drawn uniformly from the grid.
    """
    space = grid_space(spec.size)
    cells = [(x, y) for x in range(1, spec.size + 1) for y in range(1, spec.size + 1)]
    rules = {r.belief: r for r in spec.responses}
    rows = []
    for j, g in enumerate(substreams(seed, spec.n)):
        belief = BELIEFS[j % len(BELIEFS)]
        r = rules.get(belief)
        path, due = [], None
        x, y = cells[g.integers(len(cells))]
        for t in range(spec.L):
            if t > 0:
                if due == t:
                    pool = [c for c in cells if r.target.contains(*c)]
                    due = None
                elif due is not None:
                    pool = [c for c in cells if not (r.cause.contains(*c) or r.target.contains(*c))]
                else:
                    pool = cells
                x, y = pool[g.integers(len(pool))]
            path.append((x, y, belief))
            if r is not None and due is None and r.cause.contains(x, y):
                due = t + 1 + int(g.integers(2))
        rows.append(space.indices(path))
    return Dataset(space, np.array(rows, dtype=np.int64))


def case3(spec: GridSpec = GridSpec(), seed: int = 0) -> tuple[Stationary, Dataset]:
    space = grid_space(spec.size)
    return Stationary.uniform(space), simulate_grid(spec, seed)
