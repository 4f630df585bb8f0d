"""Print beta, gamma and gain for a fixed list of primitive formulas on the anomaly data."""

import argparse

from tlinfer.casestudies import case1
from tlinfer.infogain import info_gain
from tlinfer.logic import parse

FORMULAS = [
    "G[>=50,<=51](x>=9)",
    "F[<=4](x<=2)",
    "F[>=70,<=79](x<=2)",
    "G[>=50,<=51](x>=8)",
    "F[<=5](x<=2)",
    "F[>=70,<=80](x<=3)",
]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    m, d = case1(seed=args.seed)
    print(f"{'formula':<24}{'beta':>8}{'gamma':>10}{'gain':>10}")
    for text in FORMULAS:
        r = info_gain(d, parse(text, m.space), m)
        print(f"{text:<24}{r.beta:>8.4f}{r.gamma:>10.4f}{r.gain:>10.5f}")


if __name__ == "__main__":
    main()
