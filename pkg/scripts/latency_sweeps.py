"""Mean one-round latency per scheme along bandwidth, group count and group size.

Writes one CSV per axis to --out-dir (columns: axis, scheme, mean_latency_s,
std_latency_s, draws).
"""

import argparse
from pathlib import Path

from paba.simulator import DEFAULT_SCHEMES, Scenario, sweep

AXIS_VALUES = {
    "bandwidth": [20e6, 40e6, 60e6, 80e6, 100e6, 120e6, 140e6],
    "group_count": [5, 8, 11, 14, 17, 20, 23, 25],
    "group_size": [2, 5, 10, 15, 20, 30, 45, 60],
}


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--processes", type=int, default=1)
    p.add_argument("--axes", default=",".join(AXIS_VALUES))
    p.add_argument("--out-dir", default="results")
    args = p.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for axis in args.axes.split(","):
        res = sweep(Scenario(seed=args.seed), axis, AXIS_VALUES[axis], args.draws,
                    DEFAULT_SCHEMES, processes=args.processes)
        (out / f"sweep_{axis}.csv").write_text(res.to_csv())
        print(f"== {axis} ({args.draws} draws)")
        print("value".rjust(12) + "".join(s.rjust(14) for s in res.schemes))
        for v, row in zip(res.values, res.mean_latency_s):
            print(f"{v:>12g}" + "".join(f"{m:>14.4f}" for m in row))
        if axis == "group_size":
            best = res.values[int(res.mean_latency_s[:, res.schemes.index("joint")].argmin())]
            print(f"joint latency is lowest at group size {best}")


if __name__ == "__main__":
    main()
