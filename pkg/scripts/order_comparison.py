"""Floquet check along classical curves at several truncation orders.

Prints, per order and branch, the largest |trace - 2| along the curve and
the first epsilon where it exceeds the acceptance tolerance.

    python scripts/order_comparison.py --orders 3,4,5 --eps-max 4.5
"""

import argparse

import numpy as np

from tonguetrace.errors import BranchLost
from tonguetrace.ham import ProblemSpec
from tonguetrace.solver import trace_branch

TOL = 5e-3


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--orders", default="3,5")
    ap.add_argument("--branches", default="p2-left,p2-right,p1-left,p1-right")
    ap.add_argument("--eps-max", type=float, default=4.5)
    ap.add_argument("--step", type=float, default=0.1)
    args = ap.parse_args()

    print(f"{'order':>5} {'branch':>9} {'points':>6} {'max check':>10} {'first over':>10} {'delta(eps_max)':>15}")
    for order in (int(v) for v in args.orders.split(",")):
        template = ProblemSpec("classical", order=order)
        for branch in args.branches.split(","):
            try:
                curve = trace_branch(template, branch, (0.05, args.eps_max), args.step)
            except BranchLost as exc:
                print(f"{order:>5} {branch:>9}  lost at eps={exc.last_epsilon:.3g}")
                continue
            checks = np.abs([p.floquet_check for p in curve.points])
            bad = curve.epsilons[checks >= TOL]
            first = f"{bad.min():.3g}" if bad.size else "-"
            print(f"{order:>5} {branch:>9} {len(checks):>6} {checks.max():>10.2e} {first:>10} "
                  f"{curve.deltas[-1]:>15.6f}")


if __name__ == "__main__":
    main()
