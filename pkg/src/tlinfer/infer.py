"""Greedy inference of a disjunction of conjunctive patterns.

Each round optimises every template on the trajectories not yet covered,
ranks the optimised primitives by exact information gain, grows a
conjunction from the best one while the Monte Carlo gain keeps rising by a
factor ``alpha``, and then removes the trajectories the pattern covers. The
rounds stop once the accumulated coverage reaches ``p_th``.

The causal variant fixes ``G(cause -> effect)`` shapes, ranks by gain plus
the truth factor of the cause, and widens the effect with further disjuncts
instead of adding top-level patterns.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .infogain import InfoGainResult, estimated_info_gain
from .logic.formula import (
    Always, And, Formula, UNBOUNDED, conj, disj, horizon, implies,
    is_state_formula, size, state_mask,
)
from .logic.formula import FormulaError
from .optimize import PenaltyConfig, PsoConfig, PsoResult, TemplateSpec, pso_optimize
from .prob import Prior, empirical_fraction, satisfaction, simulate
from .trajectory import Dataset

log = logging.getLogger(__name__)


class NonTermination(RuntimeError):
    """A round covered no new trajectories, so coverage can never reach p_th."""


class SizeGuaranteeWarning(UserWarning):
    pass


def iteration_bound(p_th: float, p_hat_th: float) -> int:
    """Most rounds needed when every pattern covers at least ``p_hat_th`` of
    what is left: ``floor(log_{1-p_hat_th}(1-p_th)) + 1``.

    A further round only starts while ``(1-p_hat_th)**(M-1) > 1-p_th``.
    """
    if p_hat_th >= 1 or p_th >= 1:
        return 1 if p_hat_th >= p_th else math.inf
    return math.floor(math.log(1 - p_th) / math.log(1 - p_hat_th) + 1e-12) + 1


def size_guarantee(n_templates: int, p_th: float, p_hat_th: float, ell_th: int) -> bool:
    if p_hat_th >= 1 or p_th >= 1:
        return n_templates - 1 <= ell_th
    return (n_templates - 1) * math.log(1 - p_th) / math.log(1 - p_hat_th) <= ell_th


@dataclass(frozen=True)
class InferConfig:
    p_th: float = 0.9
    p_hat_th: float = 0.5
    ell_th: int = 10
    alpha: float = 1.5
    epsilon: float = 0.05
    conjunction_rule: str = "coverage"     # or "epsilon"
    mc_samples: int = 10000
    rho: float = 1000.0
    seed: int = 0
    pso: PsoConfig = field(default_factory=PsoConfig)
    max_rounds: int = 50

    def __post_init__(self):
        if not 0 < self.p_th <= 1:
            raise ValueError("p_th must lie in (0, 1]")
        if not 0 < self.p_hat_th <= self.p_th:
            raise ValueError("p_hat_th must lie in (0, p_th]")
        if self.ell_th < 1:
            raise ValueError("ell_th must be >= 1")
        if self.alpha <= 1:
            raise ValueError("alpha must exceed 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.conjunction_rule not in ("coverage", "epsilon"):
            raise ValueError("conjunction_rule must be 'coverage' or 'epsilon'")
        if self.mc_samples < 1:
            raise ValueError("mc_samples must be >= 1")

    @property
    def penalty(self) -> PenaltyConfig:
        return PenaltyConfig(self.p_hat_th, self.rho)

    def check_size_guarantee(self, n_templates: int) -> bool:
        ok = size_guarantee(n_templates, self.p_th, self.p_hat_th, self.ell_th)
        if not ok:
            warnings.warn(f"with {n_templates} templates the size bound ell_th={self.ell_th} "
                          "is not guaranteed", SizeGuaranteeWarning, stacklevel=3)
        return ok


@dataclass(frozen=True)
class Candidate:
    """An optimised primitive from one round."""

    template: str
    formula: Formula
    result: InfoGainResult | None
    feasible: bool
    eta: float | None = None

    @property
    def score(self) -> float:
        g = self.result.gain if self.result is not None else -math.inf
        return g + (self.eta or 0.0)

    def to_json(self) -> dict:
        out = {"template": self.template, "formula": str(self.formula), "feasible": self.feasible}
        if self.result is not None:
            out.update(beta=self.result.beta, gamma=self.result.gamma, gain=self.result.gain)
        if self.eta is not None:
            out["eta"] = self.eta
        return out


@dataclass(frozen=True)
class Pattern:
    """One disjunct: a conjunction of primitives found in one round."""

    parts: tuple[Formula, ...]
    coverage: Fraction          # on the trajectories left at that round
    residual_size: int
    gain: float                 # exact for a single primitive, Monte Carlo otherwise
    gain_estimated: bool
    gamma: float
    candidates: tuple[Candidate, ...] = ()

    @property
    def formula(self) -> Formula:
        return conj(self.parts)

    def to_json(self) -> dict:
        return {"formula": str(self.formula), "coverage": float(self.coverage),
                "residual_size": self.residual_size, "gain": self.gain,
                "gain_estimated": self.gain_estimated, "gamma": self.gamma,
                "candidates": [c.to_json() for c in self.candidates]}


@dataclass(frozen=True)
class InferredFormula:
    patterns: tuple[Pattern, ...]
    beta: Fraction
    rounds: int
    success: bool
    size_guaranteed: bool = True

    @property
    def formula(self) -> Formula:
        return disj(p.formula for p in self.patterns)

    @property
    def size(self) -> int:
        return size(self.formula)

    def to_json(self) -> dict:
        return {"formula": str(self.formula), "beta": float(self.beta),
                "beta_exact": f"{self.beta.numerator}/{self.beta.denominator}",
                "rounds": self.rounds, "size": self.size, "success": self.success,
                "patterns": [p.to_json() for p in self.patterns]}


def _seed(base: int, *key: int) -> int:
    ss = np.random.SeedSequence(entropy=base, spawn_key=key)
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _rank(cands: Sequence[Candidate]) -> list[Candidate]:
    # feasible first, then higher score, then shorter horizon, then declaration order
    order = sorted(range(len(cands)), key=lambda k: (
        not cands[k].feasible, -round(cands[k].score, 12), horizon(cands[k].formula), k))
    return [cands[k] for k in order]


def _optimise_all(d: Dataset, p: Prior, templates: Sequence[TemplateSpec], cfg: InferConfig,
                  round_no: int, extra=None, eta=None) -> list[Candidate]:
    out = []
    for k, t in enumerate(templates):
        pso = replace(cfg.pso, seed=_seed(cfg.seed, round_no, k))
        r: PsoResult = pso_optimize(t, d, p, pso, cfg.penalty, extra)
        feasible = r.result is not None and r.result.beta >= cfg.p_hat_th
        e = eta(r.formula) if eta is not None and r.formula is not None else None
        out.append(Candidate(t.name, r.formula, r.result, feasible, e))
    return out


def _grow(d: Dataset, ranked: Sequence[Candidate], sampled: Dataset, cfg: InferConfig):
    # greedy conjunction growth from the top-ranked primitive
    parts = [ranked[0].formula]
    cur = conj(parts)
    cur_gain = estimated_info_gain(d, cur, sampled)
    for c in ranked[1:]:
        if c.formula is None or c.formula in parts:
            continue
        cand = And(cur, c.formula)
        est = estimated_info_gain(d, cand, sampled)
        if cfg.conjunction_rule == "coverage":
            covered = est.beta >= cfg.p_hat_th
        else:
            covered = abs(est.beta - cur_gain.beta) <= cfg.epsilon
        if covered and est.gain >= cfg.alpha * cur_gain.gain:
            parts.append(c.formula)
            cur, cur_gain = cand, est
            log.debug("conjunct accepted: %s (gain %.3g)", c.formula, est.gain)
    return parts, cur_gain


def infer(d: Dataset, p: Prior, templates: Sequence[TemplateSpec], cfg: InferConfig = InferConfig(),
          sampled: Dataset | None = None) -> InferredFormula:
    """Infer a DNF formula covering at least ``p_th`` of ``d``."""
    if not templates:
        raise ValueError("template list is empty")
    if d.space != p.space:
        raise ValueError("dataset and prior use different state spaces")
    guaranteed = cfg.check_size_guarantee(len(templates))
    residual = d
    beta = Fraction(0)
    patterns: list[Pattern] = []
    for round_no in range(1, cfg.max_rounds + 1):
        cands = _optimise_all(residual, p, templates, cfg, round_no)
        ranked = _rank(cands)
        if sampled is None:
            sampled = simulate(p, d.length, cfg.mc_samples, _seed(cfg.seed, 0))
        parts, est = _grow(residual, ranked, sampled, cfg)
        pat = conj(parts)
        hit = satisfaction(residual, pat)
        cov = Fraction(int(hit.sum()), residual.m)
        if cov == 0:
            raise NonTermination(f"round {round_no}: best pattern {pat} covers no remaining trajectory")
        if len(parts) == 1 and ranked[0].result is not None:
            gain, gam, estimated = ranked[0].result.gain, ranked[0].result.gamma, False
        else:
            gain, gam, estimated = est.gain, est.gamma, True
        patterns.append(Pattern(tuple(parts), cov, residual.m, gain, estimated, gam, tuple(ranked)))
        beta = beta + (1 - beta) * cov
        log.info("round %d: %s covers %s of %d, beta=%.4f", round_no, pat, cov, residual.m, float(beta))
        if beta >= cfg.p_th:
            return InferredFormula(tuple(patterns), beta, round_no, True, guaranteed)
        residual = residual.subset(~hit)
    raise NonTermination(f"coverage {float(beta):.4f} still below p_th after {cfg.max_rounds} rounds")


# ---------------------------------------------------------------- causal form

def truth_factor(d: Dataset, cause: Formula) -> float:
    """Fraction of (trajectory, time) pairs at which ``cause`` holds."""
    if not is_state_formula(cause):
        raise FormulaError(f"cause must be a state formula, got {cause}")
    mask = state_mask(cause, d.space)
    return float(mask[d.data].mean())


def _cause_of(f: Formula) -> Formula:
    # G(c -> e) is stored as Always(Or(Not(c), e))
    return f.arg.left.arg


@dataclass(frozen=True)
class CausalResult:
    cause: Formula
    eta: float
    effects: tuple[Formula, ...]
    beta: float
    gain: float
    gain_estimated: bool
    rounds: int
    success: bool
    candidates: tuple[tuple[Candidate, ...], ...] = ()
    excluded: bool = False

    @property
    def formula(self) -> Formula:
        return Always(UNBOUNDED, implies(self.cause, disj(self.effects)))

    def to_json(self) -> dict:
        out = {"cause": str(self.cause), "eta": self.eta, "excluded": self.excluded}
        if not self.excluded:
            out.update(formula=str(self.formula), beta=self.beta, gain=self.gain,
                       gain_estimated=self.gain_estimated, rounds=self.rounds,
                       success=self.success,
                       candidates=[[c.to_json() for c in r] for r in self.candidates])
        return out


def infer_causal(d: Dataset, p: Prior, causes: Sequence[Formula],
                 effects: Sequence[TemplateSpec] | None = None, cfg: InferConfig = InferConfig(),
                 effect_factory=None, sampled: Dataset | None = None) -> list[CausalResult]:
    """Infer ``G(cause -> e_1 | e_2 | ...)`` for each cause.

    ``effect_factory(cause)`` returns the effect templates (already wrapped
    as ``G(cause -> effect)``) for one cause; alternatively pass them in
    ``effects`` when there is a single cause.
    """
    if effect_factory is None:
        if effects is None or len(causes) != 1:
            raise ValueError("give effect_factory, or effects with exactly one cause")
        effect_factory = lambda c: effects  # noqa: E731
    results = []
    for ci, cause in enumerate(causes):
        eta = truth_factor(d, cause)
        if eta == 0:
            warnings.warn(f"cause {cause} never holds in the data; excluded", stacklevel=2)
            results.append(CausalResult(cause, 0.0, (), 0.0, 0.0, False, 0, False, excluded=True))
            continue
        templates = list(effect_factory(cause))
        if not templates:
            raise ValueError("no effect templates")
        chosen: list[Formula] = []
        rounds, ranked_rounds = 0, []
        residual = d
        current = None
        for round_no in range(1, cfg.max_rounds + 1):
            rounds = round_no
            cands = _optimise_all(residual, p, templates, replace(cfg, seed=_seed(cfg.seed, 1000 + ci)),
                                  round_no, eta=lambda f: truth_factor(d, _cause_of(f)))
            ranked = _rank(cands)
            ranked_rounds.append(tuple(ranked))
            best = ranked[0]
            effect = best.formula.arg.right
            chosen.append(effect)
            current = Always(UNBOUNDED, implies(cause, disj(chosen)))
            hit = satisfaction(d, current)
            beta = float(empirical_fraction(d, current))
            if beta >= cfg.p_th:
                break
            prev_left = residual.m
            residual = d.subset(~hit)
            if residual.m == prev_left and round_no > 1:
                raise NonTermination(f"effect disjunct for {cause} covers no new trajectory")
        else:
            beta = float(empirical_fraction(d, current))
        if len(chosen) == 1 and ranked_rounds[0][0].result is not None:
            gain, estimated = ranked_rounds[0][0].result.gain, False
        else:
            if sampled is None:
                sampled = simulate(p, d.length, cfg.mc_samples, _seed(cfg.seed, 0))
            gain, estimated = estimated_info_gain(d, current, sampled).gain, True
        results.append(CausalResult(cause, eta, tuple(chosen), beta, gain, estimated,
                                    rounds, beta >= cfg.p_th, tuple(ranked_rounds)))
    return results
