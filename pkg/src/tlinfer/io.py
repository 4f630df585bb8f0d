"""Reading and writing datasets, priors and run configurations.

Datasets are CSV (``traj_id,t,<var1>,...``, ``t`` 1-based) or JSON lines
(``{"id": ..., "states": [[v1, ...], ...]}``). Priors are JSON objects that
embed their state space. Configurations are TOML or JSON.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, fields
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np

from .logic.space import StateSpace
from .optimize import PsoConfig
from .prob import Dtmc, Prior, Stationary
from .trajectory import Dataset, DatasetError
from . import schemas


class InputError(ValueError):
    """Malformed input file."""


def _validate(obj, schema, what: str):
    try:
        jsonschema.validate(obj, schema)
    except jsonschema.ValidationError as e:
        loc = "/".join(map(str, e.absolute_path)) or "<root>"
        raise InputError(f"invalid {what} at {loc}: {e.message}") from None


def _coerce(space: StateSpace, raw: list[str]) -> tuple:
    out = []
    for v, text in zip(space.variables, raw):
        if v.categorical:
            out.append(text)
        else:
            try:
                out.append(int(text))
            except ValueError:
                raise InputError(f"variable {v.name} expects an integer, got {text!r}") from None
    return tuple(out)


# ---------------------------------------------------------------- datasets

def load_dataset(path, space: StateSpace) -> Dataset:
    path = Path(path)
    if path.suffix in (".jsonl", ".ndjson"):
        return _load_jsonl(path, space)
    return _load_csv(path, space)


def _load_csv(path: Path, space: StateSpace) -> Dataset:
    names = [v.name for v in space.variables]
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise InputError(f"{path} is empty")
        header = [h.strip() for h in header]
        if header[:2] != ["traj_id", "t"] or sorted(header[2:]) != sorted(names):
            raise InputError(f"{path}: header must be traj_id,t,{','.join(names)}")
        cols = [header.index(n) for n in names]
        trajs: dict[str, dict[int, tuple]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{lineno}: expected {len(header)} fields")
            tid, t = row[0].strip(), int(row[1])
            steps = trajs.setdefault(tid, {})
            if t in steps:
                raise InputError(f"{path}:{lineno}: duplicate time {t} for trajectory {tid}")
            steps[t] = _coerce(space, [row[c].strip() for c in cols])
    return _assemble(path, space, trajs)


def _load_jsonl(path: Path, space: StateSpace) -> Dataset:
    trajs: dict[str, dict[int, tuple]] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            _validate(obj, schemas.TRAJECTORY, f"trajectory on line {lineno}")
            tid = str(obj.get("id", lineno - 1))
            trajs[tid] = {k + 1: tuple(s) for k, s in enumerate(obj["states"])}
    return _assemble(path, space, trajs)


def _assemble(path, space: StateSpace, trajs: dict) -> Dataset:
    if not trajs:
        raise InputError(f"{path}: no trajectories")
    lengths = {len(s) for s in trajs.values()}
    if len(lengths) != 1:
        raise InputError(f"{path}: trajectories have differing lengths {sorted(lengths)}")
    L = lengths.pop()
    rows = []
    for tid, steps in trajs.items():
        if sorted(steps) != list(range(1, L + 1)):
            raise InputError(f"{path}: trajectory {tid} does not cover t=1..{L}")
        try:
            rows.append(space.indices([steps[t] for t in range(1, L + 1)]))
        except ValueError as e:
            raise InputError(f"{path}: trajectory {tid}: {e}") from None
    try:
        return Dataset(space, np.array(rows, dtype=np.int64), tuple(trajs))
    except DatasetError as e:
        raise InputError(str(e)) from None


def save_dataset(d: Dataset, path) -> None:
    path = Path(path)
    names = [v.name for v in d.space.variables]
    if path.suffix in (".jsonl", ".ndjson"):
        with open(path, "w") as fh:
            for tid, tr in zip(d.ids, d):
                fh.write(json.dumps({"id": str(tid), "states": [list(s) for s in tr.values()]}) + "\n")
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["traj_id", "t", *names])
        for tid, tr in zip(d.ids, d):
            for t, s in enumerate(tr.values(), start=1):
                w.writerow([tid, t, *s])


# ---------------------------------------------------------------- priors

def _state_order(space: StateSpace, states: list) -> np.ndarray:
    try:
        idx = np.array([space.index(tuple(s)) for s in states], dtype=np.int64)
    except (KeyError, ValueError) as e:
        raise InputError(f"prior lists a state outside its space: {e}") from None
    if sorted(idx.tolist()) != list(range(len(space))):
        raise InputError("prior must list every state of its space exactly once")
    return idx


def prior_from_json(obj: dict) -> Prior:
    _validate(obj, schemas.PRIOR, "prior")
    space = StateSpace.from_json(obj["space"])
    idx = _state_order(space, obj["states"])
    H = len(space)
    try:
        if obj["type"] == "stationary":
            probs = np.zeros(H)
            probs[idx] = obj["probs"]
            return Stationary(space, probs)
        p_init = np.zeros(H)
        p_init[idx] = obj["p_init"]
        P_in = np.asarray(obj["P"], dtype=float)
        if P_in.shape != (H, H):
            raise InputError(f"P must be {H}x{H}")
        P = np.zeros((H, H))
        P[np.ix_(idx, idx)] = P_in
        return Dtmc(space, p_init, P)
    except ValueError as e:
        if isinstance(e, InputError):
            raise
        raise InputError(str(e)) from None


def prior_to_json(p: Prior) -> dict:
    states = [list(s) for s in p.space.states]
    if isinstance(p, Stationary):
        return {"type": "stationary", "space": p.space.to_json(), "states": states,
                "probs": p.probs.tolist()}
    return {"type": "dtmc", "space": p.space.to_json(), "states": states,
            "p_init": p.p_init.tolist(), "P": p.P.tolist()}


def load_prior(path) -> Prior:
    with open(path) as fh:
        return prior_from_json(json.load(fh))


def save_prior(p: Prior, path) -> None:
    with open(path, "w") as fh:
        json.dump(prior_to_json(p), fh)


def load_space(path) -> StateSpace:
    with open(path) as fh:
        obj = json.load(fh)
    if "space" in obj:
        obj = obj["space"]
    _validate(obj, schemas.SPACE, "state space")
    return StateSpace.from_json(obj)


# ---------------------------------------------------------------- configuration

def load_config(path) -> dict[str, Any]:
    path = Path(path)
    if path.suffix == ".json":
        with open(path) as fh:
            obj = json.load(fh)
    else:
        try:
            import tomllib
        except ModuleNotFoundError:  # Python 3.10
            import tomli as tomllib
        with open(path, "rb") as fh:
            try:
                obj = tomllib.load(fh)
            except tomllib.TOMLDecodeError as e:
                raise InputError(f"{path}: {e}") from None
    _validate(obj, schemas.CONFIG, "config")
    return obj


def infer_config(cfg: dict[str, Any], seed: int | None = None):
    """Build an ``InferConfig`` from the ``inference``/``pso``/``penalty``
    sections of a loaded configuration."""
    from .infer import InferConfig

    inf = dict(cfg.get("inference", {}))
    pen = cfg.get("penalty", {})
    if "rho" in pen:
        inf["rho"] = pen["rho"]
    if "p_hat_th" in pen:
        inf.setdefault("p_hat_th", pen["p_hat_th"])
    pso_keys = {f.name for f in fields(PsoConfig)}
    pso = PsoConfig(**{k: v for k, v in cfg.get("pso", {}).items() if k in pso_keys})
    if seed is not None:
        inf["seed"] = seed
    try:
        return InferConfig(pso=pso, **inf)
    except (TypeError, ValueError) as e:
        raise InputError(f"bad inference settings: {e}") from None


def config_to_json(c) -> dict:
    out = asdict(c)
    pso = out.pop("pso")
    return {"inference": out, "pso": pso, "penalty": {"rho": c.rho, "p_hat_th": c.p_hat_th}}
