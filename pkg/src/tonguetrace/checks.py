"""Invariant and anchor checks behind ``tonguetrace verify``.

Each check returns a row ``{name, value, limit, passed}``; ``value`` is the
worst deviation observed.
"""

from __future__ import annotations

import math

import numpy as np

from .floquet import impulsive_trace, monodromy, monodromy_arrays
from .ham import ProblemSpec, UnknownVector, run_expansion
from .jets import Jet, jet_mul, leibniz_derivative
from .signal import CONST, COS, SIN, Signal, differentiate, solve_sho
from .solver import solve_point, trace_branch


def _row(name, value, limit):
    return {"name": name, "value": float(value), "limit": float(limit), "passed": bool(value < limit)}


def random_signal(rng, n_terms=4, max_power=2, max_freq=3, steps=(None,)):
    items = []
    for _ in range(n_terms):
        kind = (CONST, COS, SIN)[int(rng.integers(0, 3))]
        freq = 0 if kind == CONST else int(rng.integers(1, max_freq + 1))
        step = steps[int(rng.integers(0, len(steps)))]
        items.append((float(rng.normal()), int(rng.integers(0, max_power + 1)), kind, freq, step))
    return Signal.from_terms(items)


def check_sho_closure(rng, trials=20):
    """``x'' + w^2 x - F`` is exactly empty for the solved SHO."""
    worst = 0.0
    for _ in range(trials):
        f = random_signal(rng)
        w = int(rng.integers(1, 3))
        x = solve_sho(f, float(rng.normal()), float(rng.normal()), omega=w)
        res = differentiate(differentiate(x)) + x.scale(w * w) - f
        scale = max(1.0, f.max_abs_coeff())
        worst = max(worst, res.max_abs_coeff() / scale)
    return _row("signal SHO closure", worst, 1e-12)


def check_leibniz(rng, trials=20):
    worst = 0.0
    for _ in range(trials):
        order = int(rng.integers(1, 7))
        a = Jet(rng.normal(size=order + 1))
        b = Jet(rng.normal(size=order + 1))
        prod = jet_mul(a, b)
        for n in range(order + 1):
            ref = leibniz_derivative(a, b, n)
            worst = max(worst, abs(prod.derivative(n) - ref) / max(1.0, abs(ref)))
    return _row("jet Leibniz rule", worst, 1e-12)


def check_secular_free(rng, trials=6):
    worst = 0.0
    specs = [
        ProblemSpec("classical", lambda1=2, branch="cos_start", order=3),
        ProblemSpec("classical", lambda1=1, branch="sin_start", order=3),
        ProblemSpec("impulsive", lambda1=1, branch="cos_start", order=3),
        ProblemSpec("impulsive", lambda1=2, branch="sin_start", order=3),
        ProblemSpec("damped", lambda1=1, branch="zeta_start", damping=0.1, order=3),
    ]
    for spec in specs:
        for _ in range(trials):
            eps = float(rng.uniform(0.2, 2.0))
            h1 = float(rng.uniform(-1.0, -0.2))
            if spec.variant == "damped":
                h1 = max(h1, -0.9 * eps / (2 * spec.damping))
            h = (h1,) + tuple(float(v) for v in rng.normal(0, 0.3, spec.order))
            sp = ProblemSpec(spec.variant, epsilon=eps, damping=spec.damping, lambda1=spec.lambda1,
                             branch=spec.branch, order=spec.order)
            sol = run_expansion(sp, UnknownVector(float(rng.uniform(0.0, 1.2)), h))
            worst = max(worst, max(sol.resonant_content))
    return _row("secular-free orders", worst, 1e-10)


def check_det(rng, trials=8, c=0.1):
    worst = 0.0
    for _ in range(trials):
        d, e = float(rng.uniform(-0.5, 2.0)), float(rng.uniform(0.0, 3.0))
        for variant, cc in (("classical", 0.0), ("damped", c)):
            m = monodromy(variant, d, e, cc)
            worst = max(worst, abs(m.det - math.exp(-2 * math.pi * cc)))
    return _row("det(M) = exp(-2 pi c)", worst, 1e-6)


def check_impulsive_trace(n=20, jump_sign=1.0):
    D, E = np.meshgrid(np.linspace(-0.5, 2.0, n), np.linspace(-4.0, 4.0, n))
    m11, _, _, m22 = monodromy_arrays("impulsive", D, E, jump_sign=jump_sign)
    dev = np.abs(m11 + m22 - impulsive_trace(D, E))
    return _row("impulsive trace closed form vs RK", float(dev.max()), 1e-6)


def check_anchor(name, spec, branch, eps, target, tol):
    p = solve_point(spec, branch, eps)
    return _row(name, abs(p.delta - target), tol)


def check_order_refinement():
    """Along the 4pi right branch, N=5 stays at least as close to the boundary as N=3.

    (The left branch leaves the charted delta range before eps = 3.)
    """
    worst = {}
    for order in (3, 5):
        curve = trace_branch(ProblemSpec("classical", order=order), "p2-right", (0.05, 4.5), 0.1)
        pts = [p for p in curve.points if 3.0 <= p.epsilon <= 4.5]
        worst[order] = max(abs(p.floquet_check) for p in pts)
    return _row("N=5 max check <= N=3 max check (eps 3..4.5)", max(0.0, worst[5] - worst[3]), 1e-15)


def run_checks(fast=False, jump_sign=1.0, seed=20240611):
    rng = np.random.default_rng(seed)
    rows = [
        check_sho_closure(rng),
        check_leibniz(rng),
        check_secular_free(rng, trials=2 if fast else 6),
        check_det(rng, trials=3 if fast else 8),
        check_impulsive_trace(10 if fast else 20, jump_sign=jump_sign),
    ]
    if not fast:
        rows.append(check_anchor("impulsive 2pi anchor (eps=2, N=3)", ProblemSpec("impulsive", order=3),
                                 "p1-left", 2.0, 0.4802, 1e-3))
        rows.append(check_anchor("impulsive 4pi anchor (eps=1, N=3)", ProblemSpec("impulsive", order=3),
                                 "p2-left", 1.0, -0.1945, 1e-3))
        rows.append(check_order_refinement())
    return rows
