"""Debate regime as the incumbent's quality moves, for a few two-point priors and shocks.

Prints one CSV row per (prior, shock, q_I) and a short summary of where the regime flips.
"""

import argparse
import csv
import sys

import numpy as np

from debategame.equilibrium import classify_equilibrium
from debategame.model import ContestSuccess, DiscretePrior, GameConfig, ShockDistribution

SHOCKS = {
    "normal": ShockDistribution("normal", {"mu": 0.0, "sigma": 1.0}),
    "logistic": ShockDistribution("logistic", {"mu": 0.0, "s": 1.0}),
    "gumbel": ShockDistribution("gumbel", {"mu": 0.0, "beta": 1.0}),
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--highs", type=float, nargs="+", default=[0.4, 1.0, 2.0],
                        help="upper support point of the prior {0, high} with equal masses")
    parser.add_argument("--steps", type=int, default=40)
    parser.add_argument("--r", type=float, default=1.0, help="power-Tullock exponent")
    args = parser.parse_args()

    csf = ContestSuccess("power-tullock", {"r": args.r})
    grid = np.linspace(0.05, 1.0, args.steps)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["high", "shock", "q_I", "margin", "regime"])
    flips = []
    for high in args.highs:
        prior = DiscretePrior([0.0, high], [0.5, 0.5])
        for name, shock in SHOCKS.items():
            last = None
            for q_I in grid:
                out = classify_equilibrium(GameConfig(float(q_I), prior, shock, csf))
                writer.writerow([high, name, repr(float(q_I)), repr(out.margin), out.regime])
                if last is not None and out.regime != last:
                    flips.append((high, name, float(q_I), last, out.regime))
                last = out.regime
    for high, name, q_I, a, b in flips:
        print(f"prior {{0, {high}}}, {name}: {a} -> {b} near q_I = {q_I:.3f}", file=sys.stderr)


if __name__ == "__main__":
    main()
