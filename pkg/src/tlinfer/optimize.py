"""Primitive templates and particle swarm search over their parameters.

A template couples a temporal shape (``G[<=i]``, ``F[>=i1,<=i2]``,
``G F[<=i]``, ...) with a predicate family (a threshold ``x>=a`` / ``x<=a``,
or a rectangle over two coordinates). Its parameters are integers; particles
move in the continuous box spanned by the parameter ranges and are rounded
before every evaluation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .logic.formula import (
    AtLeast, AtMost, Always, Atom, Between, Eventually, Formula, FormulaError,
    Rel, UNBOUNDED, conj, implies,
)
from .logic.semantics import HorizonError
from .infogain import InfoGainResult, SupportError, info_gain
from .prob import Prior
from .trajectory import Dataset


@dataclass(frozen=True)
class Param:
    name: str
    low: int
    high: int

    def __post_init__(self):
        if self.low > self.high:
            raise ValueError(f"empty range for parameter {self.name}: [{self.low}, {self.high}]")


@dataclass(frozen=True)
class TemplateSpec:
    """A parametrised primitive formula: ``build(theta)`` for integer ``theta``."""

    name: str
    params: tuple[Param, ...]
    build: Callable[[tuple[int, ...]], Formula] = field(compare=False)
    kind: str = ""

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([p.low for p in self.params], dtype=float),
                np.array([p.high for p in self.params], dtype=float))

    def grid_size(self) -> int:
        return math.prod(p.high - p.low + 1 for p in self.params)

    def grid(self):
        """Every parameter vector in the box (for exhaustive search)."""
        return itertools.product(*(range(p.low, p.high + 1) for p in self.params))


@dataclass(frozen=True)
class PredicateFamily:
    params: tuple[Param, ...]
    build: Callable[[tuple[int, ...]], Formula] = field(compare=False)
    name: str = "pi"


def threshold_family(space, variable: str) -> PredicateFamily:
    """``x>=a`` (polarity 0) or ``x<=a`` (polarity 1) with ``a`` in the domain of ``x``."""
    v = space.variable(variable)
    if v.categorical:
        raise ValueError(f"{variable} is categorical")

    def build(theta):
        pol, a = theta
        return Atom(variable, Rel.LE if pol else Rel.GE, int(a))

    return PredicateFamily((Param("polarity", 0, 1), Param("a", v.low, v.high)), build, variable)


def rectangle(xvar: str, x1: int, x2: int, yvar: str, y1: int, y2: int) -> Formula:
    return conj([Atom(xvar, Rel.GE, x1), Atom(xvar, Rel.LE, x2),
                 Atom(yvar, Rel.GE, y1), Atom(yvar, Rel.LE, y2)])


def rectangle_family(xvar: str, xr: tuple[int, int], yvar: str, yr: tuple[int, int]) -> PredicateFamily:
    """Axis-aligned rectangles inside ``xr`` x ``yr``, parametrised by corner and extent."""

    def build(theta):
        x1, wx, y1, wy = theta
        return rectangle(xvar, x1, min(x1 + wx, xr[1]), yvar, y1, min(y1 + wy, yr[1]))

    params = (Param("x1", *xr), Param("wx", 0, xr[1] - xr[0]),
              Param("y1", *yr), Param("wy", 0, yr[1] - yr[0]))
    return PredicateFamily(params, build, f"rect({xvar},{yvar})")


# "[]" shapes take (i1, width); the others a single bound i
SHAPES = ("G<=", "G>=", "G[]", "F<=", "F>=", "F[]", "GF<=", "FG<=")


def _temporal(shape: str, imax: int) -> tuple[Param, ...]:
    if shape.endswith("[]"):
        return (Param("i1", 1, imax - 1), Param("w", 1, imax - 1))
    return (Param("i", 1, imax),)


def _wrap(shape: str, t: tuple[int, ...], imax: int, pred: Formula) -> Formula:
    if shape.endswith("[]"):
        i1, w = t
        iv = Between(i1, min(i1 + w, imax))
    elif shape.endswith(">="):
        iv = AtLeast(t[0])
    else:
        iv = AtMost(t[0])
    if shape == "GF<=":
        return Always(UNBOUNDED, Eventually(iv, pred))
    if shape == "FG<=":
        return Eventually(UNBOUNDED, Always(iv, pred))
    return (Always if shape.startswith("G") else Eventually)(iv, pred)


def make_template(shape: str, family: PredicateFamily, imax: int,
                  wrap: Callable[[Formula], Formula] | None = None) -> TemplateSpec:
    """Template for one temporal shape; ``imax`` caps every temporal parameter."""
    if shape not in SHAPES:
        raise ValueError(f"unknown template shape {shape!r}")
    if imax < 2:
        raise ValueError("temporal parameters need imax >= 2")
    tparams = _temporal(shape, imax)
    nt = len(tparams)

    def build(theta):
        theta = tuple(int(v) for v in theta)
        f = _wrap(shape, theta[:nt], imax, family.build(theta[nt:]))
        return wrap(f) if wrap else f

    return TemplateSpec(f"{shape} {family.name}", tparams + family.params, build, shape)


def primitive_templates(space, L: int, variable: str | None = None,
                        shapes: Sequence[str] = SHAPES) -> list[TemplateSpec]:
    """The standard template set over threshold predicates on one variable.

    Temporal parameters range over ``1..L-1`` so every instance is decidable
    on length-``L`` trajectories.
    """
    if variable is None:
        numeric = [v.name for v in space.variables if not v.categorical]
        if len(numeric) != 1:
            raise ValueError("name the predicate variable explicitly")
        variable = numeric[0]
    fam = threshold_family(space, variable)
    return [make_template(s, fam, L - 1) for s in shapes]


def causal_templates(cause: Formula, family: PredicateFamily, imax: int,
                     shapes: Sequence[str] = ("G<=", "G>=", "G[]", "F<=", "F[]")) -> list[TemplateSpec]:
    """Effect templates wrapped as ``G(cause -> effect)``."""
    bad = set(shapes) - {"G<=", "G>=", "G[]", "F<=", "F[]"}
    if bad:
        raise ValueError(f"effect shapes {sorted(bad)} make the response formula undecidable")
    wrap = lambda e: Always(UNBOUNDED, implies(cause, e))  # noqa: E731
    return [make_template(s, family, imax, wrap) for s in shapes]


# ---------------------------------------------------------------- objective

@dataclass(frozen=True)
class PenaltyConfig:
    p_hat_th: float = 0.5
    rho: float = 1000.0

    def __post_init__(self):
        if not 0 < self.p_hat_th <= 1:
            raise ValueError("p_hat_th must lie in (0, 1]")
        if self.rho <= 0:
            raise ValueError("rho must be positive")

    def __call__(self, coverage: float) -> float:
        return self.rho * (self.p_hat_th - coverage) if coverage <= self.p_hat_th else 0.0


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 30
    iterations: int = 50
    inertia: float = 0.729
    c1: float = 1.494
    c2: float = 1.494
    vclamp: float = 0.5        # fraction of each parameter range
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 2 or self.iterations < 1:
            raise ValueError("need swarm_size >= 2 and iterations >= 1")
        if min(self.inertia, self.c1, self.c2, self.vclamp) <= 0:
            raise ValueError("PSO coefficients must be positive")


@dataclass(frozen=True)
class Evaluation:
    theta: tuple[int, ...]
    formula: Formula | None
    result: InfoGainResult | None
    value: float


def evaluate(theta, t: TemplateSpec, d: Dataset, p: Prior, pen: PenaltyConfig,
             extra: Callable[[Formula], float] | None = None) -> Evaluation:
    theta = tuple(int(v) for v in theta)
    try:
        f = t.build(theta)
        r = info_gain(d, f, p)
    except (SupportError, HorizonError, FormulaError):
        return Evaluation(theta, None, None, math.inf)
    value = -r.gain + pen(r.beta)
    if extra is not None:
        value += extra(f)
    return Evaluation(theta, f, r, value)


def objective(theta, t: TemplateSpec, d: Dataset, p: Prior, pen: PenaltyConfig) -> float:
    """Negated gain plus the coverage penalty; ``inf`` where the gain is undefined."""
    return evaluate(theta, t, d, p, pen).value


def round_half_down(x: np.ndarray) -> np.ndarray:
    return np.ceil(x - 0.5)


@dataclass
class PsoResult:
    theta: tuple[int, ...]
    formula: Formula | None
    result: InfoGainResult | None
    value: float
    history: list[float]
    evaluations: int

    @property
    def feasible(self) -> bool:
        return self.value < math.inf and self.result is not None


def pso_optimize(t: TemplateSpec, d: Dataset, p: Prior, cfg: PsoConfig = PsoConfig(),
                 pen: PenaltyConfig = PenaltyConfig(),
                 extra: Callable[[Formula], float] | None = None) -> PsoResult:
    """Minimise ``objective`` over the template's integer box.

    Each particle owns an RNG substream of ``SeedSequence(cfg.seed)``, so the
    outcome depends only on the seed. ``extra`` adds a formula-dependent term
    to the objective (used for side constraints).
    """
    lo, hi = t.bounds
    dim = len(lo)
    span = hi - lo
    vmax = cfg.vclamp * span
    rngs = [np.random.Generator(np.random.PCG64(s))
            for s in np.random.SeedSequence(cfg.seed).spawn(cfg.swarm_size)]
    cache: dict[tuple[int, ...], Evaluation] = {}

    def score(x: np.ndarray) -> Evaluation:
        theta = tuple(int(v) for v in np.clip(round_half_down(x), lo, hi))
        ev = cache.get(theta)
        if ev is None:
            ev = cache[theta] = evaluate(theta, t, d, p, pen, extra)
        return ev

    X = np.stack([lo + g.random(dim) * span for g in rngs])
    V = np.stack([(2 * g.random(dim) - 1) * vmax for g in rngs])
    evs = [score(x) for x in X]
    pbest, pval = X.copy(), np.array([e.value for e in evs])
    best_ev = min(evs, key=lambda e: e.value)
    gbest = X[int(np.argmin(pval))].copy()
    history = [best_ev.value]

    for _ in range(cfg.iterations):
        for j, g in enumerate(rngs):
            r1, r2 = g.random(dim), g.random(dim)
            V[j] = (cfg.inertia * V[j] + cfg.c1 * r1 * (pbest[j] - X[j])
                    + cfg.c2 * r2 * (gbest - X[j]))
            V[j] = np.clip(V[j], -vmax, vmax)
            X[j] = np.clip(X[j] + V[j], lo, hi)
        # the swarm moves synchronously, then every particle is scored
        for j in range(cfg.swarm_size):
            ev = score(X[j])
            if ev.value < pval[j]:
                pval[j], pbest[j] = ev.value, X[j].copy()
            if ev.value < best_ev.value:
                best_ev, gbest = ev, X[j].copy()
        history.append(best_ev.value)

    if best_ev.formula is None:
        # nothing scored finite; report the lower corner so callers still get a formula
        theta = tuple(int(v) for v in lo)
        return PsoResult(theta, t.build(theta), None, math.inf, history, len(cache))
    return PsoResult(best_ev.theta, best_ev.formula, best_ev.result, best_ev.value,
                     history, len(cache))


def exhaustive_optimize(t: TemplateSpec, d: Dataset, p: Prior,
                        pen: PenaltyConfig = PenaltyConfig()) -> Evaluation:
    """Best parameter vector by full enumeration (first one wins ties)."""
    best = None
    for theta in t.grid():
        ev = evaluate(theta, t, d, p, pen)
        if best is None or ev.value < best.value:
            best = ev
    return best
