"""Command-line entry point: ``tlinfer <subcommand> ...``.

Exit status is 0 on success, 2 for usage and input errors, 3 when a
computation cannot be carried out (support violation, infeasible constraint,
no progress during inference).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

import jsonschema

from . import schemas
from .automata import UnsupportedFormula
from .casestudies import (
    AnomalySpec, GridSpec, InfeasibleConstraint, case1, case2, case3,
)
from .infer import NonTermination, infer, infer_causal, iteration_bound
from .infogain import SupportError, estimated_info_gain, info_gain
from .io import (
    InputError, infer_config, load_config, load_dataset, load_prior, load_space,
    save_dataset, save_prior,
)
from .logic import FormulaError, ParseError, parse
from .logic.space import SpaceError
from .optimize import SHAPES, causal_templates, make_template, rectangle_family, threshold_family
from .prob import PriorError, satisfaction, simulate
from .trajectory import DatasetError

log = logging.getLogger("tlinfer")

USAGE_ERRORS = (ParseError, InputError, DatasetError, SpaceError, PriorError, FormulaError,
                json.JSONDecodeError, FileNotFoundError, jsonschema.ValidationError)
COMPUTE_ERRORS = (SupportError, InfeasibleConstraint, NonTermination)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _emit(args, obj: dict, text: str | None = None, schema=None):
    if schema is not None:
        jsonschema.validate(obj, schema)
    out = text if args.format == "text" and text is not None else json.dumps(obj, indent=2)
    if args.output:
        Path(args.output).write_text(out + "\n")
    else:
        print(out)


def _config(args) -> dict:
    return load_config(args.config) if args.config else {}


def _space_and_prior(args):
    prior = load_prior(args.prior) if getattr(args, "prior", None) else None
    if prior is not None:
        return prior.space, prior
    if getattr(args, "space", None):
        return load_space(args.space), None
    raise UsageError("give --prior or --space so the state space is known")


def _templates(cfg: dict, space, L: int):
    tc = cfg.get("templates", {})
    shapes = tc.get("shapes", list(SHAPES))
    bad = set(shapes) - set(SHAPES)
    if bad:
        raise UsageError(f"unknown template shapes {sorted(bad)}")
    if not shapes:
        raise UsageError("template list is empty")
    variable = tc.get("variable")
    if variable is None:
        numeric = [v.name for v in space.variables if not v.categorical]
        if len(numeric) != 1:
            raise UsageError("set templates.variable: the space has several numeric variables")
        variable = numeric[0]
    imax = tc.get("imax", L - 1)
    if imax > L - 1:
        raise UsageError(f"templates.imax={imax} exceeds L-1={L - 1}")
    fam = threshold_family(space, variable)
    return [make_template(s, fam, imax) for s in shapes]


# ---------------------------------------------------------------- subcommands

def cmd_infogain(args) -> int:
    space, prior = _space_and_prior(args)
    if prior is None:
        raise UsageError("infogain needs --prior")
    d = load_dataset(args.data, space)
    f = parse(args.formula, space)
    if args.estimate:
        cfg = infer_config(_config(args), args.seed)
        n = args.mc_samples or cfg.mc_samples
        sampled = simulate(prior, d.length, n, args.seed)
        r = estimated_info_gain(d, f, sampled)
    else:
        try:
            r = info_gain(d, f, prior)
        except UnsupportedFormula as e:
            raise UsageError(f"{e}; use --estimate for formulas with connectives") from None
    obj = {"formula": str(f), **r.to_json(), "estimated": bool(args.estimate)}
    text = f"{f}\n  beta  = {r.beta:.6g}\n  gamma = {r.gamma:.6g}\n  gain  = {r.gain:.6g}  (L={r.length})"
    _emit(args, obj, text, schemas.INFOGAIN_OUT)
    return 0


def _report(res, cfg) -> str:
    lines = [f"inferred: {res.formula}",
             f"coverage {float(res.beta):.4f} after {res.rounds} round(s) "
             f"(bound {iteration_bound(cfg.p_th, cfg.p_hat_th)}), size {res.size}", ""]
    for k, p in enumerate(res.patterns, start=1):
        lines.append(f"round {k}: pattern {p.formula}  covers {float(p.coverage):.4f} of {p.residual_size}")
        lines.append(f"  {'formula':<34} {'beta':>7} {'gamma':>10} {'gain':>10}")
        for c in p.candidates:
            if c.result is None:
                lines.append(f"  {str(c.formula):<34} {'-':>7} {'-':>10} {'-':>10}")
            else:
                r = c.result
                lines.append(f"  {str(c.formula):<34} {r.beta:7.4f} {r.gamma:10.4g} {r.gain:10.4g}")
        lines.append("")
    return "\n".join(lines).rstrip()


def _causal_report(results) -> str:
    lines = []
    for r in results:
        if r.excluded:
            lines.append(f"excluded (cause never holds): {r.cause}")
            continue
        tag = "estimated" if r.gain_estimated else "exact"
        lines.append(f"{r.formula}\n  beta={r.beta:.4f} gain={r.gain:.4g} ({tag}) eta={r.eta:.4f}")
    return "\n".join(lines)


def cmd_infer(args) -> int:
    space, prior = _space_and_prior(args)
    if prior is None:
        raise UsageError("infer needs --prior")
    d = load_dataset(args.data, space)
    raw = _config(args)
    cfg = infer_config(raw, args.seed)
    if "causal" in raw or args.causal:
        cc = raw.get("causal")
        if not cc:
            raise UsageError("causal mode needs a [causal] section with causes")
        causes = [parse(c, space) for c in cc["causes"]]
        numeric = [v for v in space.variables if not v.categorical]
        xv = space.variable(cc.get("x", numeric[0].name))
        yv = space.variable(cc.get("y", numeric[1].name if len(numeric) > 1 else numeric[0].name))
        fam = rectangle_family(xv.name, (xv.low, xv.high), yv.name, (yv.low, yv.high))
        imax = cc.get("imax", min(8, d.length - 1))
        shapes = cc.get("shapes", ["G<=", "G>=", "G[]", "F<=", "F[]"])
        try:
            factory = lambda c: causal_templates(c, fam, imax, shapes)  # noqa: E731
            factory(causes[0])
        except ValueError as e:
            raise UsageError(str(e)) from None
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            results = infer_causal(d, prior, causes, cfg=cfg, effect_factory=factory)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        obj = {"results": [r.to_json() for r in results],
               "excluded": [str(r.cause) for r in results if r.excluded]}
        _emit(args, obj, _causal_report(results), schemas.CAUSAL_OUT)
        return 0
    templates = _templates(raw, space, d.length)
    res = infer(d, prior, templates, cfg)
    obj = res.to_json()
    _emit(args, obj, _report(res, cfg), schemas.INFER_OUT)
    return 0


def cmd_simulate(args) -> int:
    raw = _config(args)
    sim = dict(raw.get("simulation", {}))
    case = args.case or sim.get("case", "1")
    n = args.n if args.n is not None else sim.get("n")
    L = args.L if args.L is not None else sim.get("L")
    if (n is not None and n < 1) or (L is not None and L < 1):
        raise UsageError("n and L must be >= 1")
    if case == "1":
        spec = AnomalySpec() if n is None and L is None else AnomalySpec(n or 100, L or 100)
        if spec.L < 80:
            raise UsageError("Case I windows need L >= 80")
        prior, d = case1(args.seed, spec)
    elif case in ("2a", "2b"):
        prior, d = case2(case[1], n or 100, L or 100, args.seed)
    elif case == "3":
        prior, d = case3(GridSpec(n=n or 60, L=L or 30), args.seed)
    else:
        if not args.prior:
            raise UsageError("--case prior needs --prior")
        prior = load_prior(args.prior)
        d = simulate(prior, L or 100, n or 100, args.seed)
    if not args.output:
        raise UsageError("simulate needs --output")
    save_dataset(d, args.output)
    if args.prior_out:
        save_prior(prior, args.prior_out)
    print(json.dumps({"output": str(args.output), "m": d.m, "L": d.length, "case": case,
                      "seed": args.seed}))
    return 0


def cmd_eval(args) -> int:
    space, _ = _space_and_prior(args)
    d = load_dataset(args.data, space)
    f = parse(args.formula, space)
    v = satisfaction(d, f)
    beta = float(v.mean())
    obj = {"formula": str(f), "beta": beta, "m": d.m, "verdicts": [bool(x) for x in v],
           "ids": [str(i) for i in d.ids]}
    text = f"{f}\n  beta = {beta:.6g} ({int(v.sum())}/{d.m})"
    _emit(args, obj, text, schemas.EVAL_OUT)
    return 0


def cmd_dfa(args) -> int:
    from .automata import build_dfa
    space, _ = _space_and_prior(args)
    f = parse(args.formula, space)
    a = build_dfa(f, space)
    dump = a.dump()
    if args.format == "json":
        obj = {"formula": str(f), "negated": a.negated, "states": list(a.labels),
               "accepting": [a.labels[q] for q in range(a.n_states) if a.accepting[q]],
               "delta": a.delta.tolist()}
        _emit(args, obj)
    else:
        _emit(args, {}, dump)
    return 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master RNG seed (default 0)")
    common.add_argument("--config", default=argparse.SUPPRESS, help="TOML or JSON run configuration")
    common.add_argument("--output", default=argparse.SUPPRESS, help="write the result here")
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)

    ap = argparse.ArgumentParser(prog="tlinfer", parents=[common],
                                 description="Information-guided temporal logic inference.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("infogain", parents=[common], help="beta, gamma and gain of one formula")
    p.add_argument("formula")
    p.add_argument("--data", required=True)
    p.add_argument("--prior", required=True)
    p.add_argument("--estimate", action="store_true", help="Monte Carlo gamma (any decidable formula)")
    p.add_argument("--mc-samples", type=int, default=None)
    p.set_defaults(func=cmd_infogain)

    p = sub.add_parser("infer", parents=[common], help="infer a formula from a dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--prior", required=True)
    p.add_argument("--causal", action="store_true", help="causal form (needs a [causal] config section)")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("simulate", parents=[common], help="generate a dataset")
    p.add_argument("--case", choices=("1", "2a", "2b", "3", "prior"), default=None)
    p.add_argument("--prior", help="prior file for --case prior")
    p.add_argument("--prior-out", help="also write the prior used")
    p.add_argument("-n", type=int, default=None, help="number of trajectories")
    p.add_argument("-L", type=int, default=None, help="trajectory length")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula on a dataset")
    p.add_argument("formula")
    p.add_argument("--data", required=True)
    p.add_argument("--prior")
    p.add_argument("--space")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("dfa", parents=[common], help="print the automaton of a primitive formula")
    p.add_argument("formula")
    p.add_argument("--prior")
    p.add_argument("--space")
    p.set_defaults(func=cmd_dfa)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.command == "dfa" and not hasattr(args, "format"):
        args.format = "text"
    for name, default in (("seed", 0), ("config", None), ("output", None), ("format", "json"),
                          ("verbose", 0)):
        if not hasattr(args, name):
            setattr(args, name, default)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except COMPUTE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except USAGE_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
