"""Probe the damped 2pi tongue near delta = 1 with both zeta0 roots.

At each epsilon the Floquet boundary is bisected on both sides of the
tongue, then Newton is started there from a small grid of h guesses.
Neither root gives a curve that stays on the boundary over the charted
range; this reproduces the numbers behind leaving the tongue out.

    python scripts/damped_probe.py --eps 1.0,1.3,1.6   # about 30 minutes on one core
"""

import argparse
import itertools
from dataclasses import replace

from tonguetrace.errors import TongueTraceError
from tonguetrace.floquet import floquet_check
from tonguetrace.ham import ProblemSpec, UnknownVector
from tonguetrace.solver import AlgebraicSystem, newton_solve

# delta brackets around the 2pi tongue edges for eps in [1, 1.6], c = 0.1
SIDES = {"left": (0.7, 0.96), "right": (1.2, 1.6)}


def bisect(f, lo, hi, iters=50):
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
    ap.add_argument("--eps", default="1.0,1.3,1.6")
    ap.add_argument("--damping", type=float, default=0.1)
    ap.add_argument("--order", type=int, default=4)
    args = ap.parse_args()
    c = args.damping
    for eps in (float(v) for v in args.eps.split(",")):
        for side, (lo, hi) in SIDES.items():
            target = bisect(lambda d: floquet_check("damped", d, eps, c), lo, hi)
            print(f"eps={eps:.2f} {side}: Floquet boundary at delta={target:.6f}")
            for root in ("minus", "plus"):
                spec = ProblemSpec("damped", epsilon=eps, damping=c, order=args.order, lambda1=1,
                                   branch="zeta_start", zeta0_root=root)
                system = AlgebraicSystem(spec, (target - 0.3, target + 0.3))
                best = None
                for h1, h2 in itertools.product((-0.25, -0.5, -1.0, -2.0, -4.0), (0.0, 0.5, -0.5)):
                    guess = UnknownVector(target, (h1, h2) + (0.0,) * (args.order - 1))
                    try:
                        p = newton_solve(system, guess, max_iters=60)
                    except TongueTraceError:
                        continue
                    if best is None or abs(p.floquet_check) < abs(best.floquet_check):
                        best = p
                if best is None:
                    print(f"    {root:>5}: no convergence")
                else:
                    print(f"    {root:>5}: delta={best.delta:.6f} check={best.floquet_check:+.2e}")


if __name__ == "__main__":
    main()
