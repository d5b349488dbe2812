"""Impulsive anchor points: curve solution against Floquet bisection.

For each (branch, epsilon) the script solves the algebraic system, bisects
the oracle for the same boundary and reports the RMS gap between ``x_N``
and direct integration over one period.

    python scripts/anchors.py --orders 3,4,5
"""

import argparse

import numpy as np

from tonguetrace.cli import solution_series
from tonguetrace.floquet import floquet_check
from tonguetrace.ham import ProblemSpec
from tonguetrace.solver import branch_spec, solve_point

CASES = [("p1-left", 2.0, (0.4, 0.55)), ("p2-left", 1.0, (-0.22, -0.17)), ("p1-left", -2.0, None)]


def bisect(f, lo, hi, iters=60):
    f_lo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid * f_lo > 0:
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--orders", default="3")
    args = ap.parse_args()
    for order in (int(v) for v in args.orders.split(",")):
        template = ProblemSpec("impulsive", order=order)
        for branch, eps, bracket in CASES:
            p = solve_point(template, branch, eps)
            _, x_ham, x_rk, _ = solution_series(branch_spec(template, branch), p)
            rms = float(np.sqrt(np.mean((x_ham - x_rk) ** 2)))
            oracle = "-"
            if bracket:
                oracle = f"{bisect(lambda d: floquet_check('impulsive', d, eps), *bracket):.6f}"
            print(f"N={order} {branch:>8} eps={eps:+.2f}  Delta={p.delta:.6f}  oracle={oracle}  "
                  f"check={p.floquet_check:+.2e}  rms={rms:.2e}")


if __name__ == "__main__":
    main()
