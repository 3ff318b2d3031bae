"""Run the end-to-end flow/cut gap experiment over the regression corpus.

Prints one report per instance and exits nonzero if any rounded-cut to
flow ratio exceeds the recorded pipeline bound.
"""

import argparse
import sys
from fractions import Fraction

from faceflow.config import DEFAULT_CONFIG
from faceflow.experiments import gap_experiment
from faceflow.instances import (
    Instance,
    cycle_instance,
    grid_graph,
    random_caps,
    random_demands,
    random_outerplanar,
)
from faceflow.polyflow import DemandMatrix

F = Fraction


def corpus(seeds):
    out = []
    g = cycle_instance(6)
    out.append(("c6", Instance(
        g, face=tuple(range(6)), vcaps=(F(1),) * 6,
        demands=DemandMatrix.from_pairs([(0, 3, F(1)), (1, 4, F(1))]),
    )))
    gg, face = grid_graph(3, 3)
    out.append(("grid3x3", Instance(
        gg, face=face, vcaps=(F(1),) * 9,
        demands=DemandMatrix.from_pairs([(0, 8, F(1)), (2, 6, F(1))]),
    )))
    for s in seeds:
        go, fo = random_outerplanar(6, s)
        out.append((f"outer6-{s}", Instance(
            go, face=fo, vcaps=random_caps(6, s),
            demands=random_demands(fo, s),
        )))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--random-instances", type=int, default=5)
    args = ap.parse_args()

    bound = DEFAULT_CONFIG.pipeline_ratio_bound
    worst = 0.0
    for name, inst in corpus(range(args.seed, args.seed + args.random_instances)):
        rep = gap_experiment(inst, args.samples, args.seed)
        print(f"== {name} ==")
        for line in rep.lines():
            print("  " + line)
        if rep.gap_ratio is not None:
            worst = max(worst, rep.gap_ratio)
    print(f"worst ratio: {worst:.4f}  (recorded bound {bound})")
    return 0 if worst <= bound else 1


if __name__ == "__main__":
    sys.exit(main())
