"""Compare what is learned from the same birth-death data under two different prior chains."""

import argparse
import warnings

from tlinfer.casestudies import case2
from tlinfer.infer import InferConfig, infer
from tlinfer.optimize import primitive_templates


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-n", type=int, default=100)
    ap.add_argument("-L", type=int, default=30)
    args = ap.parse_args()
    for variant in ("a", "b"):
        m, d = case2(variant, n=args.n, L=args.L, seed=args.seed)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r = infer(d, m, primitive_templates(m.space, d.length), InferConfig(seed=args.seed))
        print(f"prior {variant}: beta={float(r.beta):.2f} rounds={r.rounds}\n  {r.formula}")


if __name__ == "__main__":
    main()
