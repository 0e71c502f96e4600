"""Run every structural check over the randomized fixture battery and tabulate the outcome.

    python3 scripts/run_battery.py --out battery.csv
"""

import argparse
import csv
import sys
import time
from collections import Counter

from debategame.battery import BATTERY_SEED, fixture_battery
from debategame.equilibrium import classify_equilibrium, sequence_invariance_check, threshold_consistency_scan
from debategame.informativeness import informativeness_thresholds
from debategame.posterior import check_posterior_signal, posterior_means


def run(fixture):
    config = fixture.config
    s = posterior_means(config)
    outcome = classify_equilibrium(config)
    signal = check_posterior_signal(config)
    scan = threshold_consistency_scan(config)
    inv = sequence_invariance_check(config)
    pair = informativeness_thresholds(config)
    return {
        "fixture": fixture.name,
        "regime": outcome.regime,
        "margin": outcome.margin,
        "win_mass": s.win_mass,
        "mean_given_win": s.mean_given_win,
        "prior_mean": s.prior_mean,
        "mean_given_loss": s.mean_given_loss,
        "crossing_quality": s.crossing_quality,
        "jensen": signal.jensen_direction,
        "signal_ok": signal.passed,
        "only_always_P": scan.only_always_P,
        "invariance": "skipped" if inv.refused else inv.passed,
        "q_L": pair.q_L,
        "q_H": pair.q_H,
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=BATTERY_SEED)
    parser.add_argument("--priors-per-cell", type=int, default=3)
    parser.add_argument("--no-continuous", action="store_true")
    parser.add_argument("--out", default=None, help="CSV path (default: stdout)")
    args = parser.parse_args()

    t0 = time.perf_counter()
    fixtures = fixture_battery(args.seed, args.priors_per_cell, continuous=not args.no_continuous)
    rows = [run(fx) for fx in fixtures]
    elapsed = time.perf_counter() - t0

    out = open(args.out, "w", newline="") if args.out else sys.stdout
    writer = csv.DictWriter(out, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    if args.out:
        out.close()

    regimes = Counter(r["regime"] for r in rows)
    bad = [r["fixture"] for r in rows
           if not (r["signal_ok"] and r["only_always_P"] and r["invariance"] in (True, "skipped"))]
    print(f"{len(rows)} fixtures in {elapsed:.1f}s; regimes {dict(regimes)}; {len(bad)} with a failed check",
          file=sys.stderr)
    for name in bad:
        print(f"  {name}", file=sys.stderr)
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
