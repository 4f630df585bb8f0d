"""Trajectories and datasets over a finite state space.

States are stored as indices into ``space.states``; a dataset keeps all its
trajectories in one ``(m, L)`` integer array.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .logic.space import StateSpace


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class Trajectory:
    space: StateSpace
    states: tuple[int, ...]

    def __post_init__(self):
        if len(self.states) < 1:
            raise DatasetError("trajectory must have length >= 1")
        n = len(self.space)
        if any(not 0 <= s < n for s in self.states):
            raise DatasetError("trajectory state outside the state space")

    @classmethod
    def from_values(cls, space: StateSpace, values: Iterable[Sequence]) -> "Trajectory":
        return cls(space, tuple(int(i) for i in space.indices(values)))

    def __len__(self):
        return len(self.states)

    def values(self) -> list[tuple]:
        return [self.space.states[i] for i in self.states]


@dataclass(frozen=True, eq=False)
class Dataset:
    space: StateSpace
    data: np.ndarray
    ids: tuple = field(default=())

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise DatasetError("dataset must be a nonempty (m, L) array of trajectories")
        if arr.min() < 0 or arr.max() >= len(self.space):
            raise DatasetError("dataset state outside the state space")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)
        ids = tuple(self.ids) if self.ids else tuple(range(arr.shape[0]))
        if len(ids) != arr.shape[0]:
            raise DatasetError("one id per trajectory required")
        object.__setattr__(self, "ids", ids)

    @classmethod
    def from_trajectories(cls, trajs: Sequence[Trajectory], ids=()) -> "Dataset":
        if not trajs:
            raise DatasetError("dataset must be nonempty")
        lengths = {len(t) for t in trajs}
        if len(lengths) != 1:
            raise DatasetError(f"trajectories have differing lengths {sorted(lengths)}")
        space = trajs[0].space
        return cls(space, np.array([t.states for t in trajs]), ids)

    @property
    def m(self) -> int:
        return self.data.shape[0]

    @property
    def length(self) -> int:
        return self.data.shape[1]

    def __len__(self):
        return self.m

    def __getitem__(self, i) -> Trajectory:
        return Trajectory(self.space, tuple(int(v) for v in self.data[i]))

    def __iter__(self):
        for i in range(self.m):
            yield self[i]

    def subset(self, mask) -> "Dataset":
        mask = np.asarray(mask)
        if mask.dtype == bool:
            idx = np.flatnonzero(mask)
        else:
            idx = mask
        return Dataset(self.space, self.data[idx], tuple(self.ids[i] for i in idx))

    def __eq__(self, other):
        return (isinstance(other, Dataset) and self.space == other.space
                and self.ids == other.ids and np.array_equal(self.data, other.data))

    __hash__ = None
