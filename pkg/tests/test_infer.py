from fractions import Fraction

import numpy as np
import pytest

from conftest import line_space
from tlinfer.casestudies import GridSpec, Rect, Response, case3
from tlinfer.infer import (
    InferConfig, NonTermination, SizeGuaranteeWarning, infer, infer_causal,
    iteration_bound, size_guarantee, truth_factor,
)
from tlinfer.logic import (
    AtMost, Always, Atom, Eventually, FormulaError, Rel, UNBOUNDED, satisfies,
)
from tlinfer.optimize import (
    Param, PsoConfig, TemplateSpec, causal_templates, make_template,
    rectangle_family, threshold_family,
)
from tlinfer.prob import Stationary, empirical_prob
from tlinfer.trajectory import Dataset

FAST = PsoConfig(swarm_size=10, iterations=10)


def test_iteration_bound_values():
    assert iteration_bound(0.9, 0.5) == 4
    assert iteration_bound(0.75, 0.5) == 3
    assert iteration_bound(0.99, 0.9) == 3
    assert iteration_bound(0.5, 0.5) == 2


def test_iteration_bound_is_tight():
    # rounds actually needed when every pattern covers exactly p_hat_th of the residual
    for p_th, p_hat in [(0.9, 0.5), (0.95, 0.3), (0.8, 0.6), (0.999, 0.5)]:
        left, rounds = 1.0, 0
        while 1 - left < p_th - 1e-12:
            left *= 1 - p_hat
            rounds += 1
        assert rounds <= iteration_bound(p_th, p_hat)


def test_size_guarantee():
    assert size_guarantee(3, 0.9, 0.5, 10)
    assert not size_guarantee(8, 0.9, 0.5, 10)


def test_config_validation():
    with pytest.raises(ValueError):
        InferConfig(alpha=1.0)
    with pytest.raises(ValueError):
        InferConfig(p_th=0.5, p_hat_th=0.6)
    with pytest.raises(ValueError):
        InferConfig(conjunction_rule="both")
    assert InferConfig(rho=20).penalty.rho == 20


def test_truth_factor_examples():
    sp = line_space(3)
    d = Dataset(sp, np.array([[2, 0, 2, 0], [0, 2, 0, 0]]))
    assert truth_factor(d, Atom("x", Rel.GE, 2)) == 0.375
    assert truth_factor(d, Atom("x", Rel.GE, 2) & Atom("x", Rel.LE, 1)) == 0
    with pytest.raises(FormulaError):
        truth_factor(d, Eventually(AtMost(1), Atom("x", Rel.GE, 1)))


def single_template_data():
    sp = line_space(4)
    p = Stationary.uniform(sp)
    d = Dataset(sp, np.array([[3, 0, 0, 0, 0]] * 6 + [[3, 1, 2, 0, 1]] * 4))
    t = TemplateSpec("x>=3", (Param("a", 3, 3),), lambda th: Atom("x", Rel.GE, th[0]), "state")
    bad = TemplateSpec("never", (Param("a", 0, 0),), lambda th: Always(AtMost(3), Atom("x", Rel.GE, 3)), "G<=")
    return p, d, [t, bad]


def test_single_template_covers_everything():
    p, d, ts = single_template_data()
    r = infer(d, p, ts, InferConfig(pso=FAST, mc_samples=500))
    assert r.rounds == 1 and len(r.patterns) == 1
    assert r.formula == Atom("x", Rel.GE, 3)
    assert r.beta == 1 and r.success


def test_result_covers_recomputed():
    sp = line_space(5)
    p = Stationary.uniform(sp)
    rng = np.random.default_rng(0)
    X = rng.integers(0, 5, size=(40, 8))
    X[:25, 2:4] = 4
    X[25:, 0] = 0
    d = Dataset(sp, X)
    ts = [make_template(s, threshold_family(sp, "x"), 7) for s in ("G<=", "G[]", "F<=")]
    cfg = InferConfig(pso=FAST, mc_samples=2000)
    r = infer(d, p, ts, cfg)
    beta = sum(satisfies(t, r.formula) for t in d) / d.m
    assert beta >= cfg.p_th and Fraction(sum(satisfies(t, r.formula) for t in d), d.m) == r.beta
    assert r.rounds <= iteration_bound(cfg.p_th, cfg.p_hat_th)
    again = infer(d, p, ts, cfg)
    assert again.formula == r.formula and again.to_json() == r.to_json()


def test_beta_accumulates_exactly():
    sp = line_space(5)
    p = Stationary.uniform(sp)
    rng = np.random.default_rng(1)
    X = rng.integers(0, 5, size=(30, 8))
    d = Dataset(sp, X)
    ts = [make_template(s, threshold_family(sp, "x"), 7) for s in ("G[]", "F[]")]
    r = infer(d, p, ts, InferConfig(pso=FAST, mc_samples=1000))
    left = Fraction(1)
    for pat in r.patterns:
        left *= 1 - pat.coverage
    assert r.beta == 1 - left
    assert float(r.beta) == pytest.approx(empirical_prob(d, r.formula))


def test_non_termination_guard():
    p, d, ts = single_template_data()
    never = TemplateSpec("never", (Param("a", 0, 0),), lambda th: Atom("x", Rel.LE, 0) & Atom("x", Rel.GE, 1))
    with pytest.raises(NonTermination):
        infer(d, p, [never], InferConfig(pso=FAST, mc_samples=100))


def test_empty_templates_rejected():
    p, d, _ = single_template_data()
    with pytest.raises(ValueError):
        infer(d, p, [], InferConfig())


def test_size_guarantee_warning():
    p, d, ts = single_template_data()
    with pytest.warns(SizeGuaranteeWarning):
        infer(d, p, ts * 6, InferConfig(pso=FAST, mc_samples=100, ell_th=1))


def small_grid():
    resp = (Response("bank_1", Rect(1, 2, 1, 2), Rect(4, 5, 4, 5)),)
    spec = GridSpec(n=30, L=12, size=5, responses=resp)
    return case3(spec, seed=2)


def test_causal_recovers_target():
    p, d = small_grid()
    fam = rectangle_family("x", (1, 5), "y", (1, 5))
    cause = Rect(1, 2, 1, 2).formula() & Atom("b", Rel.EQ, "bank_1")
    cfg = InferConfig(p_th=0.95, pso=PsoConfig(swarm_size=20, iterations=30), mc_samples=1000)
    (res,) = infer_causal(d, p, [cause], causal_templates(cause, fam, 4, shapes=("F<=", "G<=")), cfg)
    assert res.eta > 0 and res.beta >= 0.95 and res.success
    (effect,) = res.effects
    assert isinstance(effect, Eventually) and effect.interval.i <= 2
    assert res.formula == Always(UNBOUNDED, (~cause) | effect)


def test_vacuous_cause_is_excluded():
    p, d = small_grid()
    fam = rectangle_family("x", (1, 5), "y", (1, 5))
    never = Atom("x", Rel.GE, 3) & Atom("x", Rel.LE, 2) & Atom("b", Rel.EQ, "bank_3")
    with pytest.warns(UserWarning, match="never holds"):
        (res,) = infer_causal(d, p, [never], causal_templates(never, fam, 3), InferConfig(pso=FAST))
    assert res.excluded and res.eta == 0 and res.to_json()["excluded"]


def test_causal_needs_effect_templates():
    p, d = small_grid()
    with pytest.raises(ValueError):
        infer_causal(d, p, [Atom("x", Rel.GE, 1), Atom("x", Rel.GE, 2)], [], InferConfig())
