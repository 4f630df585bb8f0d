import json

import numpy as np
import pytest

from conftest import random_prior
from tlinfer.casestudies import case1, case3, GridSpec
from tlinfer.io import (
    InputError, config_to_json, infer_config, load_config, load_dataset, load_prior,
    load_space, prior_from_json, prior_to_json, save_dataset, save_prior,
)
from tlinfer.logic import StateSpace


@pytest.mark.parametrize("suffix", [".csv", ".jsonl"])
def test_dataset_round_trip(tmp_path, suffix):
    _, d = case3(GridSpec(n=6, L=5), seed=0)
    path = tmp_path / f"d{suffix}"
    save_dataset(d, path)
    back = load_dataset(path, d.space)
    np.testing.assert_array_equal(back.data, d.data)
    assert [str(i) for i in d.ids] == list(back.ids)


def test_case1_round_trip(tmp_path):
    m, d = case1(seed=1)
    save_dataset(d, tmp_path / "d.csv")
    save_prior(m, tmp_path / "p.json")
    p = load_prior(tmp_path / "p.json")
    np.testing.assert_array_equal(p.P, m.P)
    np.testing.assert_array_equal(load_dataset(tmp_path / "d.csv", p.space).data, d.data)
    assert load_space(tmp_path / "p.json") == m.space


@pytest.mark.parametrize("seed", range(4))
def test_prior_round_trip(seed):
    sp = StateSpace.of(numeric={"x": (1, 3)}, categorical={"b": ("u", "v")})
    p = random_prior(np.random.default_rng(seed), sp)
    q = prior_from_json(json.loads(json.dumps(prior_to_json(p))))
    assert type(q) is type(p) and q.key == p.key


def test_prior_state_order_is_respected():
    obj = {"type": "stationary", "space": {"variables": [{"name": "x", "low": 0, "high": 1}]},
           "states": [[1], [0]], "probs": [0.9, 0.1]}
    assert prior_from_json(obj).probs.tolist() == [0.1, 0.9]
    obj["states"] = [[1], [1]]
    with pytest.raises(InputError):
        prior_from_json(obj)


def test_bad_prior_rows():
    obj = {"type": "dtmc", "space": {"variables": [{"name": "x", "low": 0, "high": 1}]},
           "states": [[0], [1]], "p_init": [1, 0], "P": [[0.5, 0.4], [0, 1]]}
    with pytest.raises(InputError):
        prior_from_json(obj)


@pytest.mark.parametrize("body,msg", [
    ("traj_id,t,x\n0,1,3\n0,1,4\n", "duplicate"),
    ("traj_id,t,y\n0,1,3\n", "header"),
    ("traj_id,t,x\n0,1,3\n1,1,4\n1,2,4\n", "differing"),
    ("traj_id,t,x\n0,1,11\n", "outside"),
    ("traj_id,t,x\n0,1,a\n", "integer"),
])
def test_csv_errors(tmp_path, body, msg):
    path = tmp_path / "d.csv"
    path.write_text(body)
    with pytest.raises(InputError, match=msg):
        load_dataset(path, StateSpace.of(numeric={"x": (1, 10)}))


def test_jsonl_schema_error(tmp_path):
    path = tmp_path / "d.jsonl"
    path.write_text('{"id": 1, "states": []}\n')
    with pytest.raises(InputError):
        load_dataset(path, StateSpace.of(numeric={"x": (1, 10)}))


def test_config_toml(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text("[inference]\np_th = 0.8\nalpha = 2.0\n[pso]\nswarm_size = 12\n[penalty]\nrho = 50\n")
    cfg = infer_config(load_config(path), seed=9)
    assert (cfg.p_th, cfg.alpha, cfg.pso.swarm_size, cfg.rho, cfg.seed) == (0.8, 2.0, 12, 50, 9)
    again = infer_config(config_to_json(cfg))
    assert again == cfg


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"inference": {"p_thh": 0.8}}))
    with pytest.raises(InputError, match="inference"):
        load_config(path)


def test_config_semantic_error(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"inference": {"p_th": 0.4, "p_hat_th": 0.6}}))
    with pytest.raises(InputError):
        infer_config(load_config(path))
