"""Finite discrete state spaces built from integer and categorical variables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class SpaceError(ValueError):
    pass


@dataclass(frozen=True)
class Variable:
    """A state coordinate.

    Numeric variables take every integer in ``[low, high]``; categorical ones
    take one of ``labels``.
    """

    name: str
    low: int = 0
    high: int = 0
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not self.name or not self.name.isidentifier():
            raise SpaceError(f"bad variable name {self.name!r}")
        if self.labels is not None:
            if len(self.labels) == 0:
                raise SpaceError(f"categorical variable {self.name!r} has no labels")
            if len(set(self.labels)) != len(self.labels):
                raise SpaceError(f"duplicate labels for {self.name!r}")
        elif self.low > self.high:
            raise SpaceError(f"empty domain [{self.low}, {self.high}] for {self.name!r}")

    @property
    def categorical(self) -> bool:
        return self.labels is not None

    @property
    def values(self) -> tuple:
        if self.labels is not None:
            return self.labels
        return tuple(range(self.low, self.high + 1))

    def contains(self, value) -> bool:
        if self.labels is not None:
            return value in self.labels
        return isinstance(value, (int, np.integer)) and self.low <= value <= self.high


@dataclass(frozen=True)
class StateSpace:
    """Cartesian product of variables; states are indexed in product order."""

    variables: tuple[Variable, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if not self.variables:
            raise SpaceError("state space needs at least one variable")
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise SpaceError(f"duplicate variable names in {names}")
        object.__setattr__(self, "_index", {s: i for i, s in enumerate(self.states)})

    @classmethod
    def of(cls, numeric: dict[str, tuple[int, int]] | None = None,
           categorical: dict[str, Sequence[str]] | None = None) -> "StateSpace":
        vs = [Variable(n, lo, hi) for n, (lo, hi) in (numeric or {}).items()]
        vs += [Variable(n, labels=tuple(ls)) for n, ls in (categorical or {}).items()]
        return cls(tuple(vs))

    @cached_property
    def states(self) -> tuple[tuple, ...]:
        return tuple(itertools.product(*(v.values for v in self.variables)))

    def __len__(self) -> int:
        return len(self.states)

    def variable(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise SpaceError(f"unknown variable {name!r}")

    def position(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise SpaceError(f"unknown variable {name!r}")

    def index(self, state: Sequence) -> int:
        try:
            return self._index[tuple(state)]
        except KeyError:
            raise SpaceError(f"state {tuple(state)!r} is outside the state space") from None

    def indices(self, states: Iterable[Sequence]) -> np.ndarray:
        return np.fromiter((self.index(s) for s in states), dtype=np.int64)

    def column(self, name: str) -> np.ndarray:
        """Value of variable ``name`` at every state, as an object/int array."""
        pos = self.position(name)
        vals = [s[pos] for s in self.states]
        if self.variable(name).categorical:
            return np.array(vals, dtype=object)
        return np.array(vals, dtype=np.int64)

    def to_json(self) -> dict:
        out = []
        for v in self.variables:
            if v.categorical:
                out.append({"name": v.name, "type": "categorical", "labels": list(v.labels)})
            else:
                out.append({"name": v.name, "type": "int", "low": v.low, "high": v.high})
        return {"variables": out}

    @classmethod
    def from_json(cls, obj: dict) -> "StateSpace":
        vs = []
        for v in obj["variables"]:
            if v.get("type", "int") == "categorical":
                vs.append(Variable(v["name"], labels=tuple(v["labels"])))
            else:
                vs.append(Variable(v["name"], int(v["low"]), int(v["high"])))
        return cls(tuple(vs))
