"""Priors over length-L trajectories, simulation and empirical probabilities.

Simulation draws every trajectory from its own substream
``SeedSequence(seed).spawn(n)[j]`` (PCG64), consuming exactly ``L`` uniforms
per trajectory, so results do not depend on how trajectories are batched.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .logic.formula import Formula
from .logic.semantics import satisfaction_vector
from .logic.space import StateSpace
from .trajectory import Dataset, Trajectory

TOL = 1e-12
ENUM_LIMIT = 10**6


class PriorError(ValueError):
    pass


class SupportWarning(UserWarning):
    pass


def _probability_vector(p, n: int, what: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (n,):
        raise PriorError(f"{what} must have {n} entries, got shape {p.shape}")
    if (p < 0).any():
        raise PriorError(f"{what} has negative entries")
    if abs(p.sum() - 1.0) > TOL:
        raise PriorError(f"{what} sums to {p.sum()!r}, not 1")
    p = p.copy()
    p.setflags(write=False)
    return p


@dataclass(frozen=True, eq=False)
class Stationary:
    """i.i.d. prior: every time step draws a state from ``probs``."""

    space: StateSpace
    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _probability_vector(self.probs, len(self.space), "stationary distribution"))
        if (self.probs <= 0).any():
            warnings.warn("stationary prior gives zero mass to some states; "
                          "information gain may be undefined", SupportWarning, stacklevel=3)

    @classmethod
    def uniform(cls, space: StateSpace) -> "Stationary":
        n = len(space)
        return cls(space, np.full(n, 1.0 / n))

    @property
    def key(self):
        return ("stationary", self.space, self.probs.tobytes())

    @property
    def p_init(self) -> np.ndarray:
        return self.probs

    def as_dtmc(self) -> "Dtmc":
        return Dtmc(self.space, self.probs, np.tile(self.probs, (len(self.space), 1)))


@dataclass(frozen=True, eq=False)
class Dtmc:
    """Labelled DTMC over ``space.states``; ``S_0`` is the support of ``p_init``."""

    space: StateSpace
    p_init: np.ndarray
    P: np.ndarray

    def __post_init__(self):
        H = len(self.space)
        object.__setattr__(self, "p_init", _probability_vector(self.p_init, H, "initial distribution"))
        P = np.asarray(self.P, dtype=float)
        if P.shape != (H, H):
            raise PriorError(f"transition matrix must be {H}x{H}, got {P.shape}")
        if (P < 0).any():
            raise PriorError("transition matrix has negative entries")
        bad = np.abs(P.sum(axis=1) - 1.0) > TOL
        if bad.any():
            raise PriorError(f"rows {np.flatnonzero(bad).tolist()} of the transition matrix do not sum to 1")
        P = P.copy()
        P.setflags(write=False)
        object.__setattr__(self, "P", P)

    @property
    def initial_states(self) -> np.ndarray:
        return np.flatnonzero(self.p_init > 0)

    @property
    def key(self):
        return ("dtmc", self.space, self.p_init.tobytes(), self.P.tobytes())


Prior = Union[Stationary, Dtmc]


def _transition(p: Prior) -> np.ndarray:
    if isinstance(p, Stationary):
        return np.broadcast_to(p.probs, (len(p.space), len(p.space)))
    return p.P


# ---------------------------------------------------------------- probabilities

def prior_prob(p: Prior, s) -> float:
    """Prior mass of one trajectory (0 for trajectories outside the support)."""
    states = np.asarray(getattr(s, "states", s), dtype=np.int64)
    if isinstance(p, Stationary):
        return float(np.prod(p.probs[states]))
    mass = p.p_init[states[0]]
    if len(states) > 1:
        mass = mass * np.prod(p.P[states[:-1], states[1:]])
    return float(mass)


def prior_log_probs(p: Prior, X: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        if isinstance(p, Stationary):
            return np.log(p.probs)[X].sum(axis=1)
        out = np.log(p.p_init)[X[:, 0]]
        if X.shape[1] > 1:
            out = out + np.log(p.P)[X[:, :-1], X[:, 1:]].sum(axis=1)
        return out


def brute_force_enumerate(p: Prior, L: int) -> list[tuple[Trajectory, float]]:
    """Every positive-mass trajectory of length ``L`` with its exact prior mass."""
    n = len(p.space)
    if n ** L > ENUM_LIMIT:
        raise PriorError(f"|S|^L = {n}^{L} exceeds the enumeration limit {ENUM_LIMIT}")
    out = []
    for states in itertools.product(range(n), repeat=L):
        mass = prior_prob(p, states)
        if mass > 0:
            out.append((Trajectory(p.space, states), mass))
    return out


def enumerate_array(p: Prior, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Array form of ``brute_force_enumerate``: ``(X, masses)``."""
    n = len(p.space)
    if n ** L > ENUM_LIMIT:
        raise PriorError(f"|S|^L = {n}^{L} exceeds the enumeration limit {ENUM_LIMIT}")
    X = np.array(list(itertools.product(range(n), repeat=L)), dtype=np.int64).reshape(-1, L)
    if isinstance(p, Stationary):
        mass = np.prod(p.probs[X], axis=1)
    else:
        mass = p.p_init[X[:, 0]] * np.prod(p.P[X[:, :-1], X[:, 1:]], axis=1)
    keep = mass > 0
    return X[keep], mass[keep]


# ---------------------------------------------------------------- simulation

def substreams(seed: int, n: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.PCG64(ss)) for ss in np.random.SeedSequence(seed).spawn(n)]


def uniforms(seed: int, n: int, L: int) -> np.ndarray:
    """``(n, L)`` uniforms, row ``j`` from substream ``j``."""
    return np.stack([g.random(L) for g in substreams(seed, n)]) if n else np.empty((0, L))


def _inverse_cdf(cdf_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    # rescale so rounding never lets u < 1 run past the last positive entry
    cdf_rows = cdf_rows / cdf_rows[:, -1:]
    idx = (u[:, None] >= cdf_rows).sum(axis=1)
    return np.minimum(idx, cdf_rows.shape[1] - 1)


def sample_paths(p: Prior, U: np.ndarray, start: np.ndarray | None = None) -> np.ndarray:
    """Turn uniforms into state paths; ``start`` gives the state before column 0."""
    n, L = U.shape
    X = np.empty((n, L), dtype=np.int64)
    T = np.cumsum(_transition(p), axis=1)
    for t in range(L):
        if t == 0 and start is None:
            cdf = np.broadcast_to(np.cumsum(p.p_init), (n, len(p.space)))
        else:
            prev = start if t == 0 else X[:, t - 1]
            cdf = T[prev]
        X[:, t] = _inverse_cdf(cdf, U[:, t])
    return X


def simulate(p: Prior, L: int, n: int, seed: int = 0) -> Dataset:
    """``n`` independent length-``L`` trajectories drawn from the prior."""
    if L < 1 or n < 1:
        raise PriorError("simulate needs L >= 1 and n >= 1")
    return Dataset(p.space, sample_paths(p, uniforms(seed, n, L)))


# ---------------------------------------------------------------- empirical probability

def satisfaction(d: Dataset, f: Formula) -> np.ndarray:
    return satisfaction_vector(f, d.data, d.space)


def empirical_fraction(d: Dataset, f: Formula) -> Fraction:
    return Fraction(int(satisfaction(d, f).sum()), d.m)


def empirical_prob(d: Dataset, f: Formula) -> float:
    """Fraction of trajectories in ``d`` that satisfy ``f``."""
    return float(empirical_fraction(d, f))
