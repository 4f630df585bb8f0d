import itertools

import numpy as np
import pytest

from tlinfer.casestudies import (
    AnomalySpec, CASE2_PRESENT, ChainParams, DEFAULT_RESPONSES, GridSpec,
    InfeasibleConstraint, Rect, Window, birth_death_chain, case1, case2, case3,
    conditioned_paths, simulate_grid,
)
from tlinfer.logic import Atom, Rel
from tlinfer.prob import Dtmc, brute_force_enumerate, uniforms
from conftest import line_space


def test_chain_structure():
    m = birth_death_chain(CASE2_PRESENT)
    np.testing.assert_allclose(m.P.sum(axis=1), 1.0)
    assert m.P[4, 3] == 0.6 and m.P[4, 4] == 0.2 and m.P[4, 5] == 0.2
    assert m.P[0, 0] == 0.5 and m.P[0, 1] == 0.5
    assert m.P[9, 9] == 0.5 and m.P[9, 8] == 0.5
    np.testing.assert_allclose(m.p_init, 0.1)


def test_chain_params_validation():
    with pytest.raises(ValueError):
        ChainParams(p_stay=0.5, p_down=0.5, p_up=0.5)
    with pytest.raises(ValueError):
        ChainParams(n=1)


def test_case1_constraints():
    m, d = case1(seed=4)
    X = d.data + 1
    assert d.m == 100 and d.length == 100 and X.min() >= 1 and X.max() <= 10
    first, last = X[:60], X[40:]
    assert np.all(first[:, 0:5].min(axis=1) <= 2)
    assert np.all(first[:, 50:52] >= 9)
    assert np.all(last[:, 70:80].min(axis=1) <= 2)


def test_case1_is_reproducible():
    assert case1(seed=2)[1] == case1(seed=2)[1]
    assert case1(seed=2)[1] != case1(seed=3)[1]


def test_case1_rejects_empty():
    with pytest.raises(ValueError):
        case1(spec=AnomalySpec(n=0))


def test_unconstrained_rows_follow_the_chain():
    m, d = case2("a", n=20, L=15, seed=1)
    P = birth_death_chain(CASE2_PRESENT).P
    assert np.all(P[d.data[:, :-1], d.data[:, 1:]] > 0)
    assert m.P[4, 4] == pytest.approx(1 / 3)
    with pytest.raises(ValueError):
        case2("c")


def test_infeasible_window():
    sp = line_space(3)
    m = Dtmc(sp, [1, 0, 0], [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    U = uniforms(0, 5, 4)
    with pytest.raises(InfeasibleConstraint):
        conditioned_paths(m, 4, [Window(2, 3, Atom("x", Rel.GE, 2))], U)


def test_conditioned_law_matches_rejection():
    # exact conditional law vs the prior restricted to satisfying paths
    sp = line_space(3)
    P = np.array([[0.5, 0.4, 0.1], [0.3, 0.3, 0.4], [0.2, 0.5, 0.3]])
    m = Dtmc(sp, [0.6, 0.3, 0.1], P)
    ws = [Window(1, 2, Atom("x", Rel.LE, 0), "any"), Window(4, 4, Atom("x", Rel.GE, 2), "all")]
    ok = {}
    for t, w in brute_force_enumerate(m, 4):
        s = t.states
        if min(s[0], s[1]) == 0 and s[3] == 2:
            ok[s] = w
    z = sum(ok.values())
    n = 40000
    X = conditioned_paths(m, 4, ws, uniforms(8, n, 4))
    counts = {}
    for row in map(tuple, X):
        counts[row] = counts.get(row, 0) + 1
    assert set(counts) <= set(ok)
    for s, w in ok.items():
        q = w / z
        se = np.sqrt(q * (1 - q) / n)
        assert abs(counts.get(s, 0) / n - q) <= 5 * se + 1e-9


def test_overlapping_windows_rejected():
    sp = line_space(3)
    m = Dtmc(sp, [1 / 3] * 3, np.full((3, 3), 1 / 3))
    with pytest.raises(ValueError):
        conditioned_paths(m, 5, [Window(1, 3, Atom("x", Rel.GE, 1)), Window(3, 4, Atom("x", Rel.GE, 1))],
                          uniforms(0, 2, 5))


def test_rect_geometry():
    a, b, c = Rect(1, 2, 1, 2), Rect(2, 3, 2, 3), Rect(3, 4, 1, 1)
    assert a.overlaps(b) and not a.overlaps(c)
    assert bool(a.contains(2, 1)) and not bool(a.contains(3, 1))


def test_grid_responses_hold():
    spec = GridSpec(n=30, L=25)
    d = simulate_grid(spec, seed=5)
    xs, ys, bs = (d.space.column(n)[d.data] for n in ("x", "y", "b"))
    rules = {r.belief: r for r in DEFAULT_RESPONSES}
    fired = 0
    for i, t in itertools.product(range(d.m), range(d.length - 2)):
        r = rules[bs[i, t]]
        if r.cause.contains(xs[i, t], ys[i, t]):
            fired += 1
            assert any(r.target.contains(xs[i, t + k], ys[i, t + k]) for k in (1, 2))
    assert fired > 0
    assert len(set(bs[:, 0])) == 3 and np.all(bs == bs[:, :1])


def test_case3_reproducible():
    p, d = case3(GridSpec(n=9, L=10), seed=1)
    assert d == case3(GridSpec(n=9, L=10), seed=1)[1]
    np.testing.assert_allclose(p.probs, 1 / len(p.space))
