import numpy as np
import pytest
from hypothesis import strategies as st

from tlinfer.logic import (
    AtLeast, AtMost, Always, And, Atom, Between, Eventually, Next, Not, Or,
    Release, Rel, StateSpace, UNBOUNDED, Until,
)
from tlinfer.prob import Dtmc, Stationary
from tlinfer.trajectory import Dataset, Trajectory


def line_space(n: int) -> StateSpace:
    return StateSpace.of(numeric={"x": (0, n - 1)})


SPACE3 = line_space(3)


@pytest.fixture
def space2():
    return line_space(2)


@pytest.fixture
def space3():
    return SPACE3


def atoms_for(space: StateSpace):
    v = space.variable("x")
    return st.builds(Atom, st.just("x"), st.sampled_from([Rel.GE, Rel.LE]),
                     st.integers(v.low, v.high))


intervals = st.one_of(
    st.just(UNBOUNDED),
    st.builds(AtMost, st.integers(0, 4)),
    st.builds(AtLeast, st.integers(0, 4)),
    st.integers(0, 3).flatmap(lambda a: st.builds(Between, st.just(a), st.integers(a + 1, a + 3))),
)


def formulas(space: StateSpace = SPACE3, depth: int = 3):
    """Random formulas over every operator, of bounded nesting depth."""

    def extend(children):
        return st.one_of(
            st.builds(Not, children),
            st.builds(And, children, children),
            st.builds(Or, children, children),
            st.builds(Next, children),
            st.builds(Eventually, intervals, children),
            st.builds(Always, intervals, children),
            st.builds(Until, children, children, intervals),
            st.builds(Release, children, children, intervals),
        )

    return st.recursive(atoms_for(space), extend, max_leaves=2 ** depth)


def trajectories(space: StateSpace = SPACE3, min_len: int = 1, max_len: int = 6):
    n = len(space)
    return st.lists(st.integers(0, n - 1), min_size=min_len, max_size=max_len).map(
        lambda xs: Trajectory(space, tuple(xs)))


def random_probs(rng: np.random.Generator, n: int, floor: float = 0.05) -> np.ndarray:
    p = rng.dirichlet(np.ones(n)) + floor
    return p / p.sum()


def random_prior(rng: np.random.Generator, space: StateSpace, kind: str | None = None):
    """Stationary or DTMC prior with every entry positive."""
    n = len(space)
    kind = kind or ("stationary" if rng.random() < 0.5 else "dtmc")
    if kind == "stationary":
        return Stationary(space, random_probs(rng, n))
    P = np.stack([random_probs(rng, n) for _ in range(n)])
    return Dtmc(space, random_probs(rng, n), P)


def random_dataset(rng: np.random.Generator, space: StateSpace, m: int, L: int) -> Dataset:
    return Dataset(space, rng.integers(0, len(space), size=(m, L)))
