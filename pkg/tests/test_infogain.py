import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import line_space, random_dataset, random_prior
from tlinfer.infogain import (
    SupportError, caching, clamp, clear_cache, estimated_info_gain, gain_closed_form,
    gamma, gamma_dtmc, gamma_stationary, info_gain, kl_direct, posterior_mass,
)
from tlinfer.logic import (
    AtLeast, AtMost, Always, Atom, Between, Eventually, HorizonError, Not, Rel,
    TRUE, UNBOUNDED, satisfies,
)
from tlinfer.prob import (
    Dtmc, Stationary, brute_force_enumerate, enumerate_array, prior_prob, simulate,
)
from tlinfer.logic import satisfaction_vector
from tlinfer.trajectory import Dataset

SP2 = line_space(2)
pi = Atom("x", Rel.GE, 1)


def brute_gamma(f, p, L):
    X, w = enumerate_array(p, L)
    return float(w[satisfaction_vector(f, X, p.space)].sum())


# ---------------------------------------------------------------- closed form

@pytest.mark.parametrize("beta,gam,expected", [(0.63, 0.1429, 0.0062), (0.76, 0.2877, 0.0048)])
def test_closed_form_reference_rows(beta, gam, expected):
    assert abs(gain_closed_form(beta, gam, 100) - expected) <= 5e-5


def test_closed_form_matches_hand_computation():
    b, g, L = 0.3, 0.6, 7
    expected = (b * math.log(b / g) + (1 - b) * math.log((1 - b) / (1 - g))) / L
    assert gain_closed_form(b, g, L) == pytest.approx(expected, rel=1e-15)


@given(st.floats(0, 1), st.integers(1, 200))
def test_equal_frequencies_carry_no_gain(b, L):
    if 0 < b < 1:
        assert gain_closed_form(b, b, L) == pytest.approx(0, abs=1e-15)


def test_boundary_conventions():
    assert gain_closed_form(0.0, 0.5, 1) == pytest.approx(math.log(2))
    assert gain_closed_form(1.0, 0.25, 2) == pytest.approx(math.log(4) / 2)
    assert gain_closed_form(1.0, 1.0, 3) == 0.0
    assert gain_closed_form(0.0, 0.0, 3) == 0.0
    with pytest.raises(SupportError):
        gain_closed_form(0.2, 0.0, 10)
    with pytest.raises(SupportError):
        gain_closed_form(0.8, 1.0, 10)
    with pytest.raises(ValueError):
        gain_closed_form(1.2, 0.5, 10)


@settings(max_examples=300)
@given(st.floats(0.001, 0.999), st.floats(0.001, 0.999), st.integers(1, 50))
def test_gain_nonnegative_and_complement_symmetric(b, g, L):
    v = gain_closed_form(b, g, L)
    assert v >= 0
    assert v == pytest.approx(gain_closed_form(1 - b, 1 - g, L), rel=1e-9, abs=1e-15)


def test_tiny_gamma_is_finite():
    v = gain_closed_form(0.9948, 5.58e-16, 100)
    assert abs(v - 0.3491) <= 5e-4


# ---------------------------------------------------------------- exact gamma

def test_gamma_eventually_one_step():
    p = Stationary.uniform(SP2)
    assert gamma_stationary(Eventually(AtMost(1), pi), p, 2) == pytest.approx(0.75, abs=1e-12)


def test_gamma_response_three_steps():
    p = Stationary.uniform(SP2)
    f = Always(UNBOUNDED, Eventually(AtMost(1), pi))
    assert gamma_stationary(f, p, 3) == pytest.approx(0.625, abs=1e-12)


@pytest.mark.parametrize("L", [2, 3, 6])
def test_gamma_short_always(L):
    p = Stationary.uniform(SP2)
    assert gamma_stationary(Always(AtMost(1), pi), p, L) == pytest.approx(0.25, abs=1e-12)


def test_gamma_chain_examples():
    m = Dtmc(SP2, [1.0, 0.0], [[0.7, 0.3], [0.4, 0.6]])
    assert gamma_dtmc(Always(AtMost(1), Atom("x", Rel.LE, 0)), m, 2) == pytest.approx(0.7, abs=1e-12)
    assert gamma_dtmc(Always(AtMost(3), pi), m, 5) == 0.0


def test_gamma_needs_long_enough_trajectories():
    with pytest.raises(HorizonError):
        gamma_stationary(Eventually(AtMost(4), pi), Stationary.uniform(SP2), 3)


def template_instances(imax):
    preds = st.builds(Atom, st.just("x"), st.sampled_from([Rel.GE, Rel.LE]), st.integers(0, 3))
    ivs = st.one_of(
        st.builds(AtMost, st.integers(0, imax)),
        st.builds(AtLeast, st.integers(0, imax)),
        st.integers(0, imax - 1).flatmap(lambda a: st.builds(Between, st.just(a), st.integers(a + 1, imax))),
    )
    return st.one_of(
        st.builds(Always, ivs, preds),
        st.builds(Eventually, ivs, preds),
        st.builds(lambda i, p: Always(UNBOUNDED, Eventually(AtMost(i), p)), st.integers(0, imax), preds),
        st.builds(lambda i, p: Eventually(UNBOUNDED, Always(AtMost(i), p)), st.integers(0, imax), preds),
    )


@settings(max_examples=150, deadline=None)
@given(template_instances(5), st.integers(0, 2 ** 32), st.integers(6, 7))
def test_gamma_matches_enumeration(f, seed, L):
    rng = np.random.default_rng(seed)
    sp = line_space(4)
    for kind in ("stationary", "dtmc"):
        p = random_prior(rng, sp, kind)
        assert abs(gamma(f, p, L) - brute_gamma(f, p, L)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(template_instances(4), st.integers(0, 2 ** 32))
def test_identical_rows_match_stationary(f, seed):
    p = random_prior(np.random.default_rng(seed), line_space(4), "stationary")
    assert abs(gamma_stationary(f, p, 6) - gamma_dtmc(f, p.as_dtmc(), 6)) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(template_instances(4), st.integers(0, 2 ** 32))
def test_negation_complements_gamma(f, seed):
    p = random_prior(np.random.default_rng(seed), line_space(4))
    assert gamma(f, p, 6) + gamma(Not(f), p, 6) == pytest.approx(1.0, abs=1e-12)


def test_cache_is_transparent():
    rng = np.random.default_rng(11)
    sp = line_space(4)
    p = random_prior(rng, sp, "dtmc")
    fs = [Eventually(Between(1, 3), Atom("x", Rel.LE, a)) for a in range(4)]
    clear_cache()
    with caching(False):
        cold = [gamma(f, p, 8) for f in fs]
    warm = [gamma(f, p, 8) for f in fs] + [gamma(f, p, 8) for f in fs]
    assert warm == cold + cold


def test_true_has_probability_one():
    assert gamma(TRUE, Stationary.uniform(SP2), 4) == 1.0


# ---------------------------------------------------------------- gains and posterior

@pytest.mark.parametrize("seed", range(10))
def test_info_gain_equals_direct_kl(seed):
    rng = np.random.default_rng(seed)
    p = random_prior(rng, SP2)
    L = int(rng.integers(2, 7))
    d = random_dataset(rng, SP2, 12, L)
    f = Eventually(AtMost(int(rng.integers(0, L))), pi)
    r = info_gain(d, f, p)
    assert abs(r.gain - kl_direct(p, d, f)) <= 1e-10


def test_direct_kl_of_true_is_zero():
    rng = np.random.default_rng(0)
    p = random_prior(rng, SP2)
    d = random_dataset(rng, SP2, 5, 3)
    assert kl_direct(p, d, TRUE) == 0.0


@pytest.mark.parametrize("seed", range(5))
def test_posterior_properties(seed):
    rng = np.random.default_rng(seed)
    p = random_prior(rng, SP2)
    d = random_dataset(rng, SP2, 9, 4)
    f = Always(Between(1, 2), Atom("x", Rel.LE, 0))
    r = info_gain(d, f, p)
    total = sat_mass = 0.0
    for s, _ in brute_force_enumerate(p, 4):
        w = posterior_mass(p, d, f, s)
        total += w
        if satisfies(s, f):
            sat_mass += w
    assert total == pytest.approx(1.0, abs=1e-12)
    assert sat_mass == pytest.approx(r.beta, abs=1e-12)


def test_posterior_equals_prior_without_information():
    p = Stationary.uniform(SP2)
    X = np.array(list(itertools.product(range(2), repeat=2)))
    d = Dataset(SP2, X)
    f = Eventually(AtMost(1), pi)       # 3 of 4 trajectories, prior 0.75
    for s, _ in brute_force_enumerate(p, 2):
        assert posterior_mass(p, d, f, s) == pytest.approx(prior_prob(p, s), abs=1e-15)
        assert posterior_mass(p, d, TRUE, s) == pytest.approx(prior_prob(p, s), abs=1e-15)
    assert info_gain(d, f, p).gain == pytest.approx(0, abs=1e-15)


def test_clamp():
    assert clamp(0.0, 100) == 0.005
    assert clamp(1.0, 100) == 0.995
    assert clamp(0.4, 100) == 0.4


def test_estimated_gain_of_true_is_zero():
    p = Stationary.uniform(SP2)
    d = simulate(p, 4, 10, seed=1)
    assert estimated_info_gain(d, TRUE, simulate(p, 4, 50, seed=2)).gain == 0.0


def test_estimated_gain_handles_unseen_formulas():
    p = Stationary(line_space(3), [0.98, 0.01, 0.01])
    d = Dataset(p.space, np.full((10, 5), 2))
    f = Always(AtMost(4), Atom("x", Rel.GE, 2))
    sampled = simulate(p, 5, 100, seed=0)
    r = estimated_info_gain(d, f, sampled)
    assert r.gamma == 1 / 200 and math.isfinite(r.gain)


def test_estimated_gain_converges():
    sp = line_space(3)
    p = Stationary(sp, [0.5, 0.3, 0.2])
    d = simulate(Stationary(sp, [0.2, 0.3, 0.5]), 6, 200, seed=1)
    f = Eventually(Between(1, 3), Atom("x", Rel.GE, 2))
    exact = info_gain(d, f, p)
    n = 10000
    est = estimated_info_gain(d, f, simulate(p, 6, n, seed=2))
    se = math.sqrt(exact.gamma * (1 - exact.gamma) / n)
    assert abs(est.gamma - exact.gamma) <= 5 * se
