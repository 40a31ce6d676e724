"""Partitioned training (5 groups x 10 workers) vs. a single group of 50 (no partitioning).

Both use the joint allocation; a single group means every worker uploads a
full-length gradient. Reports mean per-round latency and the cumulative
latency of R rounds; since the update is the same for any partition, equal
round counts mean equal accuracy.
"""

import argparse

import numpy as np

from paba.simulator import Scenario, run_rounds


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--draws", type=int, default=20)
    p.add_argument("--rounds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    layouts = {"partitioned 5x10": (5, 10), "single group 1x50": (1, 50)}
    totals = {}
    for name, (k, n) in layouts.items():
        sc = Scenario(n_groups=k, workers_per_group=n, seed=args.seed)
        totals[name] = np.array([run_rounds(sc, "joint", args.rounds, d).total_latency for d in range(args.draws)])
        print(f"{name:>18}: {args.rounds} rounds take {totals[name].mean():.3f} s on average "
              f"(std {totals[name].std():.3f}, {args.draws} draws)")
    part, feel = totals.values()
    print(f"latency reduction from partitioning: {100 * (1 - part.mean() / feel.mean()):.2f}%")


if __name__ == "__main__":
    main()
