"""Monte Carlo contraction report for the random tree embedding.

For each instance family, prints the per-pair mean contraction ratio
d_T(F(u), F(v)) / d_G(u, v) with a one-sided 99% lower confidence bound,
and exits nonzero if any bound drops below the guaranteed 1/960 floor.
"""

import argparse
import sys

from faceflow.config import DEFAULT_CONFIG
from faceflow.experiments import distortion_experiment
from faceflow.instances import cycle_instance, random_outerplanar


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--random-instances", type=int, default=10)
    args = ap.parse_args()

    floor = 1.0 / DEFAULT_CONFIG.embed_contraction
    graphs = [("c6", cycle_instance(6))]
    for s in range(args.seed, args.seed + args.random_instances):
        g, _ = random_outerplanar(5 + s % 3, s)
        graphs.append((f"outer-{s}", g))

    ok = True
    for name, g in graphs:
        rep = distortion_experiment(g, args.samples, args.seed)
        print(f"== {name} (n={g.n}, {args.samples} samples) ==")
        for (u, v), (mean, lcb) in sorted(rep.table.items()):
            print(f"  pair {u}-{v}: mean={mean:.5f} lcb={lcb:.5f}")
        print(f"  min-lcb: {rep.min_lcb:.5f}  floor: {floor:.5f}")
        ok = ok and rep.min_lcb >= floor
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
