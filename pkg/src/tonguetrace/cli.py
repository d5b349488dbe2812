"""``tonguetrace`` command line: chart, trace, solve-point, verify."""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from dataclasses import replace

import numpy as np

from . import io
from .config import (
    build_config,
    convert,
    load_config,
)
from .errors import BranchLost, ConfigError, TongueTraceError
from .floquet import grid_scan, integrate
from .ham import ProblemSpec
from .signal import differentiate
from .solver import AlgebraicSystem, branch_spec, solve_point, trace_branch

log = logging.getLogger("tonguetrace")

# default branch per (variant, lambda(1)) for solve-point
DEFAULT_POINT_BRANCH = {
    ("impulsive", 1): "p1-left",
    ("impulsive", 2): "p2-left",
    ("classical", 1): "p1-right",
    ("classical", 2): "p2-left",
    ("damped", 2): "p2-left",
}


def template_for(cfg) -> ProblemSpec:
    if cfg.variant == "damped":
        return ProblemSpec("damped", damping=cfg.damping, order=cfg.order, branch="zeta_start",
                           zeta0_root=cfg.zeta0_root)
    return ProblemSpec(cfg.variant, order=cfg.order)


# -- commands ---------------------------------------------------------------


def cmd_chart(cfg):
    nx, ny = cfg.res
    chart = grid_scan(cfg.variant, cfg.delta, cfg.eps, nx, ny,
                      c=cfg.damping if cfg.variant == "damped" else 0.0, workers=cfg.workers)
    overlay = []
    for path in cfg.overlay:
        curve = io.read_curve_csv(path)
        overlay.extend((p.delta, p.epsilon) for p in curve.points)
    out = cfg.out or "chart.pgm"
    io.write_pgm(out, io.chart_pixels(chart, overlay))
    with open(out + ".json", "w", encoding="utf-8") as fh:
        fh.write(io.chart_metadata_json(chart) + "\n")
    unstable = int(chart.cells.sum())
    print(f"wrote {out} ({nx}x{ny}, {unstable} unstable cells)")
    return 0


def cmd_trace(cfg):
    if not cfg.branch:
        raise ConfigError("branch: required for trace")
    template = template_for(cfg)
    lo, hi = sorted(cfg.eps)
    try:
        curve = trace_branch(template, cfg.branch, (lo, hi), cfg.step, tol=cfg.tol, max_iters=cfg.max_iters)
    except BranchLost as exc:
        print(f"error: {exc} (last good eps={exc.last_epsilon})", file=sys.stderr)
        return 3
    out = cfg.out or "curve.csv"
    io.write_curve_csv(out, curve)
    worst = max(abs(p.floquet_check) for p in curve.points)
    print(f"wrote {out}: {len(curve.points)} points, max |floquet_check| = {worst:.3e}")
    return 0


def solution_series(template, point, samples=400, jump_sign=1.0):
    """``x_N(t)`` and the RK trajectory from the same initial state over one period."""
    spec = replace(template, epsilon=point.epsilon)
    system = AlgebraicSystem(spec)
    sol = system.solution(point.unknowns)
    xN = sol.xN
    x0 = float(xN(0.0))
    v0 = float(differentiate(xN)(0.0))
    period = spec.period
    t, x_rk = integrate(spec.variant, point.delta, point.epsilon, x0, v0, period, c=spec.damping,
                        samples=samples, jump_sign=jump_sign)
    x_ham = np.asarray(xN(t), dtype=float)
    return t, x_ham, x_rk, sol


def cmd_solve_point(cfg):
    eps = cfg.at
    template = template_for(cfg)
    branch = cfg.branch or DEFAULT_POINT_BRANCH[(cfg.variant, cfg.period)]
    spec = branch_spec(template, branch)
    t0 = time.perf_counter()
    point = solve_point(template, branch, eps, tol=cfg.tol)
    elapsed = time.perf_counter() - t0
    t, x_ham, x_rk, sol = solution_series(spec, point, cfg.samples)
    rms = float(np.sqrt(np.mean((x_ham - x_rk) ** 2)))
    doc = {
        "variant": cfg.variant,
        "branch": branch,
        "order": cfg.order,
        "period": "4pi" if spec.lambda1 == 2 else "2pi",
        "point": io.point_to_dict(point),
        "x_N": repr(sol.xN),
        "series": {"t": t.tolist(), "x_N": x_ham.tolist(), "x_rk": x_rk.tolist()},
        "rms": rms,
        "seconds": elapsed,
    }
    out = cfg.out or "point.json"
    io.write_json(out, doc)
    print(f"wrote {out}: delta={point.delta:.10g} at eps={eps:g}, rms(x_N - RK)={rms:.3e}, {elapsed:.2f}s")
    return 0


def cmd_verify(cfg):
    from .checks import run_checks

    rows = run_checks(fast=cfg.fast, jump_sign=cfg.jump_sign)
    doc = {"passed": all(r["passed"] for r in rows), "rows": rows}
    print(json.dumps(doc, indent=2, default=float))
    width = max(len(r["name"]) for r in rows)
    for r in rows:
        flag = "PASS" if r["passed"] else "FAIL"
        print(f"{flag}  {r['name']:<{width}}  value={r['value']:.3e}  limit={r['limit']:.1e}")
    if cfg.out:
        io.write_json(cfg.out, doc)
    return 0 if doc["passed"] else 1


COMMANDS = {"chart": cmd_chart, "trace": cmd_trace, "solve-point": cmd_solve_point, "verify": cmd_verify}


# -- argument parsing -------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="tonguetrace", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key = value file; flags override it")
        sp.add_argument("--variant", choices=["classical", "damped", "impulsive"])
        sp.add_argument("--order", type=int)
        sp.add_argument("--damping", type=float)
        sp.add_argument("--workers", type=int)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--out")

    sp = sub.add_parser("chart", help="Floquet stability chart as PGM")
    common(sp)
    sp.add_argument("--delta")
    sp.add_argument("--eps")
    sp.add_argument("--res")
    sp.add_argument("--overlay", action="append")

    sp = sub.add_parser("trace", help="trace a transition curve to CSV")
    common(sp)
    sp.add_argument("--branch")
    sp.add_argument("--eps")
    sp.add_argument("--step", type=float)
    sp.add_argument("--max-iters", type=int, dest="max_iters")
    sp.add_argument("--zeta0-root", dest="zeta0_root", choices=["minus", "plus"])

    sp = sub.add_parser("solve-point", help="one curve point plus x_N vs RK time series")
    common(sp)
    sp.add_argument("--branch")
    sp.add_argument("--eps", type=float)
    sp.add_argument("--period")
    sp.add_argument("--samples", type=int)

    sp = sub.add_parser("verify", help="run the invariant and acceptance suite")
    sp.add_argument("--config")
    sp.add_argument("--fast", action="store_true", default=None)
    sp.add_argument("--out")
    sp.add_argument("--debug-jump-sign", type=float, dest="jump_sign",
                    help="negative control: flip the impulse jump in the RK oracle")
    return p


STRING_FLAGS = ("delta", "eps", "res", "period")


def config_from_args(args):
    file_values = load_config(args.config) if getattr(args, "config", None) else {}
    overrides = {"command": args.command}
    for key, value in vars(args).items():
        if key in ("config", "command", "verbose") or value is None:
            continue
        if key == "eps" and args.command == "solve-point":
            overrides["at"] = float(value)
            continue
        if key == "overlay":
            overrides["overlay"] = list(value)
            continue
        overrides[key] = convert(key, value) if key in STRING_FLAGS else value
    return build_config(file_values, overrides)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (TongueTraceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
