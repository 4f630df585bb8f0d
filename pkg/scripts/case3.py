"""Recover cause/effect rules from agents moving on a grid with hidden beliefs."""

import argparse

from tlinfer.casestudies import DEFAULT_RESPONSES, GridSpec, case3
from tlinfer.infer import InferConfig, infer_causal
from tlinfer.optimize import causal_templates, rectangle_family


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--imax", type=int, default=8)
    args = ap.parse_args()
    spec = GridSpec()
    p, d = case3(spec, seed=args.seed)
    fam = rectangle_family("x", (1, spec.size), "y", (1, spec.size))
    causes = [r.cause_formula() for r in DEFAULT_RESPONSES]
    results = infer_causal(d, p, causes, cfg=InferConfig(p_th=0.95, seed=args.seed),
                           effect_factory=lambda c: causal_templates(c, fam, args.imax))
    for resp, res in zip(DEFAULT_RESPONSES, results):
        print(f"{resp.belief}: target {resp.target}")
        print(f"  {res.formula}\n  beta={res.beta:.3f} eta={res.eta:.3f} gain={res.gain:.4f}")


if __name__ == "__main__":
    main()
