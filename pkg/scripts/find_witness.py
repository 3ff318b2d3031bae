"""Search small planar outer-face-demand instances for a vertex flow/cut
gap, and save the first witness reaching the target ratio.
"""

import argparse
import sys
from fractions import Fraction

from faceflow.errors import BudgetExhausted
from faceflow.experiments import search_gap_instance
from faceflow.instances import save_instance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=12)
    ap.add_argument("--budget", type=float, default=120.0)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--target", default="7/5")
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    try:
        inst, phi, mcf = search_gap_instance(
            args.max_n, args.budget, seed=args.seed,
            target=Fraction(args.target),
        )
    except BudgetExhausted as exc:
        print(f"not found: {exc}")
        return 1
    print(f"witness: n={inst.graph.n} m={len(inst.graph.edges)}")
    print(f"phi: {phi}  mcf: {mcf}  ratio: {float(phi / mcf):.6f}")
    if args.out:
        save_instance(inst, args.out)
        print(f"saved: {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
