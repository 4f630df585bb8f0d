"""Information gain of a formula relative to a prior over trajectories.

With ``beta`` the fraction of the dataset satisfying ``f`` and ``gamma`` the
prior probability of ``f``, the gain per time step is

    (1/L) * (beta ln(beta/gamma) + (1-beta) ln((1-beta)/(1-gamma)))

in nats. ``gamma`` is exact for primitive formulas (backward dynamic
programming over a counter automaton, optionally in product with a DTMC) and
estimated from simulated trajectories otherwise.
"""

from __future__ import annotations

import contextlib
import math
import threading
from dataclasses import dataclass

import numpy as np

from .automata import Dfa, build_dfa, product
from .logic.formula import Formula, TrueF, horizon
from .logic.semantics import HorizonError, satisfaction_vector
from .prob import (
    Dtmc, Prior, Stationary, empirical_prob, enumerate_array, prior_prob,
)
from .trajectory import Dataset


class SupportError(ValueError):
    """Raised when the dataset puts mass where the prior puts none."""


@dataclass(frozen=True)
class InfoGainResult:
    beta: float
    gamma: float
    gain: float
    length: int

    def to_json(self) -> dict:
        return {"beta": self.beta, "gamma": self.gamma, "gain": self.gain, "L": self.length}


def _xlogx_ratio(x: float, y: float) -> float:
    if x == 0.0:
        return 0.0
    return x * math.log(x / y)


def gain_closed_form(beta: float, gamma: float, L: int) -> float:
    if L < 1:
        raise ValueError("L must be >= 1")
    for name, v in (("beta", beta), ("gamma", gamma)):
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"{name}={v} is not a probability")
    if beta > 0 and gamma == 0:
        raise SupportError(f"prior gives probability 0 to a formula observed with frequency {beta}")
    if beta < 1 and gamma == 1:
        raise SupportError(f"prior gives probability 1 to a formula violated with frequency {1 - beta}")
    g = (_xlogx_ratio(beta, gamma) + _xlogx_ratio(1.0 - beta, 1.0 - gamma)) / L
    return max(g, 0.0)


# ---------------------------------------------------------------- exact gamma

def transition_matrix(a: Dfa, dist: np.ndarray) -> np.ndarray:
    """``c[j, k]``: probability that one i.i.d. step moves ``q_j`` to ``q_k``."""
    Q = a.n_states
    C = np.zeros((Q, Q))
    rows = np.repeat(np.arange(Q), a.delta.shape[1])
    np.add.at(C, (rows, a.delta.ravel()), np.tile(dist, Q))
    return C


def acceptance_table(a: Dfa, dist: np.ndarray, L: int) -> np.ndarray:
    """Row ``l`` holds the acceptance probability from each DFA state after
    ``l`` consumed symbols, for ``l = 0..L``."""
    C = transition_matrix(a, dist)
    table = np.empty((L + 1, a.n_states))
    table[L] = a.accepting
    for l in range(L, 0, -1):
        table[l - 1] = C @ table[l]
    return table


def product_table(m: Dtmc, a: Dfa, L: int) -> np.ndarray:
    """``out[l, s, q]``: acceptance probability from product state ``(s, q)``
    after ``l`` consumed symbols (``l = 1..L``; row 0 is unused)."""
    H, Q = len(m.space), a.n_states
    out = np.zeros((L + 1, H, Q))
    out[L] = np.broadcast_to(a.accepting, (H, Q))
    cols = np.arange(H)
    for l in range(L, 1, -1):
        # W[q, s'] = value after moving to s' from DFA state q
        W = out[l][cols[None, :], a.delta]
        out[l - 1] = m.P @ W.T
    return out


def _check_horizon(f: Formula, L: int):
    h = horizon(f)
    if L < h:
        raise HorizonError(f"L={L} is shorter than the horizon {h} of {f}")


def _finish(a: Dfa, p_accept: float) -> float:
    p = min(max(p_accept, 0.0), 1.0)
    return 1.0 - p if a.negated else p


def gamma_stationary(f: Formula, dist, L: int) -> float:
    """Prior probability that an i.i.d. trajectory of length ``L`` satisfies ``f``."""
    space = dist.space
    _check_horizon(f, L)
    a = _dfa(f, space)
    table = acceptance_table(a, dist.probs, L)
    return _finish(a, float(table[0, a.initial]))


def gamma_dtmc(f: Formula, m: Dtmc, L: int) -> float:
    """Prior probability that a trajectory of ``m`` of length ``L`` satisfies ``f``."""
    _check_horizon(f, L)
    a = _dfa(f, m.space)
    prod = product(m, a)
    table = product_table(m, a, L)
    H, Q = len(m.space), a.n_states
    first = table[1].reshape(H * Q)
    return _finish(a, float(prod.init @ first))


# ---------------------------------------------------------------- memoisation

class _Cache:
    def __init__(self):
        self.enabled = True
        self.store: dict = {}
        self.lock = threading.Lock()

    def get(self, key, compute):
        if not self.enabled:
            return compute()
        with self.lock:
            if key in self.store:
                return self.store[key]
        value = compute()
        with self.lock:
            self.store.setdefault(key, value)
        return value


_DFAS = _Cache()
_GAMMAS = _Cache()


def _dfa(f: Formula, space) -> Dfa:
    return _DFAS.get((f, space), lambda: build_dfa(f, space))


def clear_cache():
    _DFAS.store.clear()
    _GAMMAS.store.clear()


@contextlib.contextmanager
def caching(enabled: bool):
    """Temporarily switch the formula/prior memo caches on or off."""
    old = (_DFAS.enabled, _GAMMAS.enabled)
    _DFAS.enabled = _GAMMAS.enabled = enabled
    try:
        yield
    finally:
        _DFAS.enabled, _GAMMAS.enabled = old


def gamma(f: Formula, p: Prior, L: int) -> float:
    """Exact prior satisfaction probability of a primitive formula."""
    if isinstance(f, TrueF):
        return 1.0

    def compute():
        if isinstance(p, Stationary):
            return gamma_stationary(f, p, L)
        return gamma_dtmc(f, p, L)

    return _GAMMAS.get((p.key, f, L), compute)


# ---------------------------------------------------------------- gains

def info_gain(d: Dataset, f: Formula, p: Prior) -> InfoGainResult:
    if d.space != p.space:
        raise ValueError("dataset and prior use different state spaces")
    L = d.length
    beta = empirical_prob(d, f)
    g = gamma(f, p, L)
    return InfoGainResult(beta, g, gain_closed_form(beta, g, L), L)


def clamp(x: float, n: int) -> float:
    lo = 1.0 / (2 * n)
    return min(max(x, lo), 1.0 - lo)


def estimated_gamma(f: Formula, sampled: Dataset) -> float:
    return clamp(empirical_prob(sampled, f), sampled.m)


def estimated_info_gain(d: Dataset, f: Formula, sampled: Dataset, L: int | None = None) -> InfoGainResult:
    """Gain with ``gamma`` replaced by its frequency in ``sampled`` (clamped)."""
    L = d.length if L is None else L
    if sampled.length != L or d.length != L:
        raise ValueError("dataset, sample and L must agree on the trajectory length")
    beta = empirical_prob(d, f)
    if isinstance(f, TrueF):
        return InfoGainResult(beta, 1.0, 0.0, L)
    g = estimated_gamma(f, sampled)
    return InfoGainResult(beta, g, gain_closed_form(beta, g, L), L)


def posterior_mass(p: Prior, d: Dataset, f: Formula, s) -> float:
    """Posterior mass of ``s`` after learning that ``f`` holds with frequency beta."""
    r = info_gain(d, f, p)
    states = np.asarray(getattr(s, "states", s), dtype=np.int64)[None, :]
    prior = prior_prob(p, states[0])
    if satisfaction_vector(f, states, p.space)[0]:
        return prior * r.beta / r.gamma if r.beta > 0 else 0.0
    return prior * (1 - r.beta) / (1 - r.gamma) if r.beta < 1 else 0.0


def kl_direct(p: Prior, d: Dataset, f: Formula, L: int | None = None) -> float:
    """(1/L) KL(posterior || prior) by summing over every trajectory (test oracle)."""
    L = d.length if L is None else L
    X, prior = enumerate_array(p, L)
    sat = satisfaction_vector(f, X, p.space)
    beta = empirical_prob(d, f)
    g = float(prior[sat].sum())
    g = min(max(g, 0.0), 1.0)
    if (beta > 0 and g == 0) or (beta < 1 and g == 1):
        raise SupportError("posterior is not absolutely continuous w.r.t. the prior")
    ratio = np.where(sat, beta / g if g > 0 else 0.0, (1 - beta) / (1 - g) if g < 1 else 0.0)
    post = prior * ratio
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(post > 0, post * np.log(ratio), 0.0)
    return float(terms.sum()) / L
