"""Monte Carlo error of the mandatory-debate value against the analytic value as n grows."""

import argparse
import math
import sys

from debategame.config_io import load_config
from debategame.montecarlo import SimulationSpec, simulate_election
from debategame.payoffs import incumbent_debate_payoff


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("config")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-exp", type=int, default=6, help="largest n is 10**max_exp")
    parser.add_argument("--workers", type=int, default=None)
    args = parser.parse_args()

    config = load_config(args.config)
    exact = incumbent_debate_payoff(config)
    print("n,estimate,stderr,abs_error,z")
    for k in range(2, args.max_exp + 1):
        n = 10 ** k
        r = simulate_election(SimulationSpec("debate-ex-ante", n, args.seed), config, workers=args.workers)
        err = abs(r.estimate - exact)
        z = err / r.stderr if r.stderr > 0 else math.inf
        print(f"{n},{r.estimate!r},{r.stderr!r},{err!r},{z:.3f}")
    print(f"analytic value {exact!r}", file=sys.stderr)


if __name__ == "__main__":
    main()
