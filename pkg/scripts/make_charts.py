"""Stability charts for the three variants with traced curves overlaid.

Writes ``<variant>.pgm`` (plus ``.json`` metadata) and one CSV per traced
branch into the output directory.

    python scripts/make_charts.py --out charts --res 260x450
"""

import argparse
import logging
from pathlib import Path

from tonguetrace import io
from tonguetrace.errors import BranchLost
from tonguetrace.floquet import grid_scan
from tonguetrace.ham import ProblemSpec
from tonguetrace.solver import trace_branch

PLANS = {
    "classical": (ProblemSpec("classical", order=3), (-0.5, 2.1), (0.0, 4.5),
                  [("p2-left", (0.05, 4.5)), ("p2-right", (0.05, 4.5)), ("p1-left", (0.05, 4.5)),
                   ("p1-right", (0.05, 4.5)), ("p1-zero", (0.05, 4.5))]),
    "impulsive": (ProblemSpec("impulsive", order=3), (-0.5, 2.0), (-4.0, 4.0),
                  [("p1-left", (-4.0, 4.0)), ("p2-left", (-4.0, 4.0)), ("p1-line", (-4.0, 4.0)),
                   ("p2-line", (-4.0, 4.0))]),
    "damped": (ProblemSpec("damped", damping=0.1, order=4, branch="zeta_start"), (-0.5, 2.1), (0.0, 3.0),
               [("p2-left", (0.0, 3.0))]),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="charts")
    ap.add_argument("--res", default="78x135")
    ap.add_argument("--workers", type=int, default=None)
    ap.add_argument("--variants", default="classical,impulsive,damped")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    nx, ny = (int(v) for v in args.res.split("x"))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    for variant in args.variants.split(","):
        template, drange, erange, branches = PLANS[variant]
        overlay = []
        for branch, rng in branches:
            try:
                curve = trace_branch(template, branch, rng, 0.05)
            except BranchLost as exc:
                logging.info("%s %s: %s", variant, branch, exc)
                continue
            io.write_curve_csv(out / f"{variant}-{branch}.csv", curve)
            overlay.extend((p.delta, p.epsilon) for p in curve.points)
            worst = max(abs(p.floquet_check) for p in curve.points)
            logging.info("%s %s: %d points, max |check| %.2e", variant, branch, len(curve.points), worst)
        chart = grid_scan(variant, drange, erange, nx, ny, c=template.damping, workers=args.workers)
        io.write_pgm(out / f"{variant}.pgm", io.chart_pixels(chart, overlay))
        (out / f"{variant}.pgm.json").write_text(io.chart_metadata_json(chart) + "\n")
        logging.info("wrote %s", out / f"{variant}.pgm")


if __name__ == "__main__":
    main()
