"""Homotopy constraint + Galerkin equations, damped Newton, and continuation in eps."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    BranchLost,
    NoConvergence,
    OutsideWindow,
    SingularJacobian,
    TongueTraceError,
)
from .floquet import floquet_check
from .galerkin import project, residual_signal, weight_norms, weight_set
from .ham import ProblemSpec, UnknownVector, run_expansion

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITERS = 50


@dataclass
class AlgebraicSystem:
    spec: ProblemSpec
    delta_window: tuple = (-math.inf, math.inf)

    def __post_init__(self):
        self._weights = weight_set(self.spec)
        self._norms = weight_norms(self._weights)

    @property
    def size(self):
        return self.spec.order + 2

    def solution(self, u):
        if not isinstance(u, UnknownVector):
            u = UnknownVector.from_list(u)
        return run_expansion(self.spec, u)

    def _evaluate(self, u):
        if not isinstance(u, UnknownVector):
            u = UnknownVector.from_list(u)
        sol = run_expansion(self.spec, u)
        res = residual_signal(self.spec, sol.xN, u.delta)
        proj = project(res, self._weights)
        out = [sol.lambda_residual] + [p / n for p, n in zip(proj, self._norms)]
        dtype = complex if self.spec.field_mode == "complex" else float
        return np.array(out, dtype=dtype), sol

    def residual_map(self, u) -> np.ndarray:
        """``[lambda constraint, projection_0 / |w_0|, ..., projection_N / |w_N|]``."""
        return self._evaluate(u)[0]

    def lambda_scale(self, u) -> float:
        """Size of the largest lambda term, at least 1.

        Near some tongue tips ``h^[k]`` grows like ``eps^-k`` and the lambda
        series carries large cancelling terms whose rounding noise alone
        exceeds the tolerance; the constraint is measured in these units.
        """
        sol = self._evaluate(u)[1]
        return max([1.0] + [abs(x) for x in sol.lambda_taylor])

    def scaled_map(self, scale):
        """Residual map with the lambda row divided by a frozen ``scale``."""
        def fun(u):
            out = self.residual_map(u)
            out[0] /= scale
            return out
        return fun

    def __call__(self, u):
        return self.residual_map(u)


@dataclass
class CurvePoint:
    epsilon: float
    delta: float
    h: tuple
    zeta0: float | None = None
    newton_iters: int = 0
    residual_norm: float = 0.0
    floquet_check: float = math.nan

    @property
    def unknowns(self):
        return UnknownVector(self.delta, tuple(self.h))


@dataclass
class TransitionCurve:
    branch_id: str
    points: list = field(default_factory=list)

    @property
    def epsilons(self):
        return np.array([p.epsilon for p in self.points])

    @property
    def deltas(self):
        return np.array([p.delta for p in self.points])


def _real(x):
    return float(np.real(x))


def fd_jacobian(fun, u, f0, rel_step=1e-7):
    """Forward differences with step ``rel_step * max(1, |u_i|)``."""
    u = np.asarray(u, dtype=float)
    cols = []
    for i in range(u.size):
        step = rel_step * max(1.0, abs(u[i]))
        up = u.copy()
        up[i] += step
        cols.append((fun(up) - f0) / step)
    return np.column_stack(cols)


def newton(fun, u0, tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS, rel_step=1e-7):
    """Damped Newton on ``fun`` (vector -> vector) with Armijo backtracking.

    The step is the minimum-norm least-squares solution of ``J du = -F``,
    so rank-deficient Jacobians (directions the equations do not see)
    leave those components untouched. Returns ``(u, norm, iterations)``.
    """
    u = np.array(u0, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("initial guess must be finite")
    f = fun(u)
    norm = float(np.linalg.norm(f))
    for it in range(max_iters + 1):
        if norm < tol:
            return u, norm, it
        if it == max_iters:
            break
        jac = fd_jacobian(fun, u, f, rel_step)
        if not np.all(np.isfinite(jac)) or not np.any(jac):
            raise SingularJacobian("finite-difference Jacobian is zero or non-finite")
        du = np.linalg.lstsq(jac, -f, rcond=None)[0]
        if np.iscomplexobj(du):
            du = du.real
        alpha = 1.0
        while True:
            trial = u + alpha * du
            try:
                ft = fun(trial)
                nt = float(np.linalg.norm(ft))
            except (TongueTraceError, ArithmeticError):
                nt = math.inf
            if np.isfinite(nt) and nt <= (1.0 - 1e-4 * alpha) * norm:
                break
            alpha *= 0.5
            if alpha < 1e-10:
                raise NoConvergence(f"line search stalled at residual {norm:.3e}")
        u, f, norm = trial, ft, nt
    raise NoConvergence(f"no convergence in {max_iters} iterations (residual {norm:.3e})")


def _oracle(spec, delta, c):
    try:
        return floquet_check(spec.variant, delta, spec.epsilon, c)
    except Exception:  # oracle failure must not hide a converged point
        return math.nan


def newton_solve(system: AlgebraicSystem, u0: UnknownVector, tol=DEFAULT_TOL,
                 max_iters=DEFAULT_MAX_ITERS, check=True) -> CurvePoint:
    """Solve ``system`` from ``u0``; converged iff residual < tol and delta in window."""
    scale = system.lambda_scale(u0)
    u, norm, iters = newton(system.scaled_map(scale), UnknownVector.to_list(u0), tol, max_iters)
    lo, hi = system.delta_window
    if not lo <= u[0] <= hi:
        raise OutsideWindow(f"delta={u[0]:.6g} outside window [{lo:.6g}, {hi:.6g}]")
    spec = system.spec
    uv = UnknownVector.from_list(u)
    zeta0 = None
    if spec.variant == "damped":
        zeta0 = _real(system.solution(uv).zeta0)
    fc = _oracle(spec, u[0], spec.damping) if check else math.nan
    return CurvePoint(spec.epsilon, float(u[0]), tuple(float(x) for x in u[1:]), zeta0, iters, norm, fc)


# -- branches ---------------------------------------------------------------

# (variant-independent) branch registry: id -> (period multiple, start, tongue index)
BRANCHES = {
    "p2-left": (2, "cos_start", 1),
    "p2-right": (2, "sin_start", 1),
    "p1-zero": (1, "cos_start", 0),
    "p1-left": (1, "sin_start", 2),
    "p1-right": (1, "cos_start", 2),
}
# the impulsive chart has its own geometry: straight lines carry the other start;
# the Delta=0 tongue is left out (no start converges onto its boundary at N=3)
IMPULSIVE_BRANCHES = {
    "p1-left": (1, "cos_start", 2),
    "p1-line": (1, "sin_start", 2),
    "p2-left": (2, "sin_start", 1),
    "p2-line": (2, "cos_start", 1),
}
DAMPED_BRANCHES = {
    "p2-left": (2, "zeta_start", 1),
}

# branches whose tip seed does not converge: (eps, delta bracket straddling
# the Floquet boundary there); tracing starts at the bisected boundary point
ANCHORS = {
    ("classical", "p1-zero"): (0.5, (-0.3, -0.05)),
    ("damped", "p2-left"): (1.0, (-0.35, -0.33)),
}


def branch_table(variant):
    if variant == "impulsive":
        return IMPULSIVE_BRANCHES
    if variant == "damped":
        return DAMPED_BRANCHES
    return BRANCHES


def branch_spec(template: ProblemSpec, branch_id: str) -> ProblemSpec:
    table = branch_table(template.variant)
    if branch_id not in table:
        raise KeyError(f"unknown branch {branch_id!r} for {template.variant}; known: {sorted(table)}")
    lam1, start, _ = table[branch_id]
    return replace(template, lambda1=lam1, branch=start)


def emanation(variant, branch_id):
    k = branch_table(variant)[branch_id][2]
    return k * k / 4.0


def window_halfwidth(variant, branch_id):
    """Half of the spacing to the next tongue, ``(2k+1)/8``."""
    k = branch_table(variant)[branch_id][2]
    return 0.5 * (2 * k + 1) / 4.0


def seed_guess(spec: ProblemSpec, branch_id: str) -> UnknownVector:
    """``delta`` at the tongue tip, ``h^[1] = -1``, higher ``h`` zero."""
    h = [-1.0] + [0.0] * spec.order
    return UnknownVector(emanation(spec.variant, branch_id), tuple(h))


def _solve_at(template, eps, guess, center, halfwidth, tol, max_iters):
    spec = replace(template, epsilon=float(eps))
    system = AlgebraicSystem(spec, (center - halfwidth, center + halfwidth))
    return newton_solve(system, guess, tol, max_iters)


def _predict(points, target, origin, predictor):
    """Extrapolate the unknowns of the last two points to ``target``.

    ``loglog`` extrapolates ``|u_i - origin_i|`` as a power of eps (same
    sign kept), which follows the ``h^[k] ~ eps^-k`` blow-up seen when a
    branch is continued toward a tip the zeroth solution cannot reach.
    """
    prev = points[-1]
    pv = np.array(prev.unknowns.to_list())
    if len(points) < 2:
        return pv
    pp = points[-2]
    qv = np.array(pp.unknowns.to_list())
    if predictor == "loglog" and min(prev.epsilon, pp.epsilon, target) > 0:
        a, b = pv - origin, qv - origin
        s = math.log(target / prev.epsilon) / math.log(prev.epsilon / pp.epsilon)
        out = pv + (pv - qv) * (target - prev.epsilon) / (prev.epsilon - pp.epsilon)
        same = (a * b > 0)
        out[same] = origin[same] + a[same] * np.abs(a[same] / b[same]) ** s
        return out
    return pv + (pv - qv) * (target - prev.epsilon) / (prev.epsilon - pp.epsilon)


def trace_curve(template: ProblemSpec, branch_id: str, eps_range, step, seed=None,
                tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS, halfwidth=None,
                on_point=None, predictor="secant") -> TransitionCurve:
    """Natural-parameter continuation in eps with a secant predictor.

    Each new eps is warm-started from the extrapolation of the last two
    accepted points; on failure the step is halved down to ``step/32``
    before the branch is declared lost. The delta window is centred on the
    previous point. ``eps_range`` may run downward (``eps1 < eps0``); the
    points are stored in increasing eps either way.
    """
    eps0, eps1 = eps_range
    if eps1 == eps0 or step <= 0:
        raise ValueError("need a nonempty eps range and step > 0")
    sign = 1.0 if eps1 > eps0 else -1.0
    spec = branch_spec(template, branch_id)
    hw = window_halfwidth(spec.variant, branch_id) if halfwidth is None else halfwidth
    guess = seed if seed is not None else seed_guess(spec, branch_id)
    origin = np.zeros(spec.order + 2)
    origin[0] = emanation(spec.variant, branch_id)
    points = []

    point = _solve_at(spec, eps0, guess, guess.delta, hw, tol, max_iters)
    points.append(point)
    if on_point:
        on_point(point)
    floor = step / 32.0
    h = step
    eps = eps0
    while sign * (eps1 - eps) > 1e-12:
        target = eps + sign * h
        if sign * (target - eps1) > 0:
            target = eps1
        prev = points[-1]
        guesses = [UnknownVector.from_list(_predict(points, target, origin, predictor))]
        if len(points) > 1:
            # the h^[k] are weakly determined and may wander along a near-null
            # direction; retry from the last point itself before cutting the step
            guesses.append(prev.unknowns)
        if seed is None:
            guesses.append(seed_guess(spec, branch_id))
        point, err = None, None
        for guess in guesses:
            try:
                point = _solve_at(spec, target, guess, prev.delta, hw, tol, max_iters)
                break
            except TongueTraceError as exc:
                err = exc
        if point is None:
            if h / 2.0 < floor * (1 - 1e-12):
                raise BranchLost(f"branch {branch_id} lost after eps={eps:.6g}: {err}", last_epsilon=eps) from err
            h /= 2.0
            log.debug("halving step to %g at eps=%g (%s)", h, eps, err)
            continue
        points.append(point)
        if on_point:
            on_point(point)
        eps = target
        h = min(step, 2.0 * h)
    if sign < 0:
        points.reverse()
    return TransitionCurve(branch_id, points)


def oracle_seed(template: ProblemSpec, branch_id: str, epsilon, bracket) -> UnknownVector:
    """Seed from the Floquet boundary: bisect the trace check inside ``bracket``.

    Used where the tip seed cannot converge (the delta=0 tongue, whose
    periodic solution tends to a constant the cos start cannot reach).
    """
    spec = branch_spec(template, branch_id)
    lo, hi = bracket
    f_lo = floquet_check(spec.variant, lo, epsilon, spec.damping)
    f_hi = floquet_check(spec.variant, hi, epsilon, spec.damping)
    if f_lo * f_hi > 0:
        raise ValueError("bracket does not straddle the stability boundary")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        f_mid = floquet_check(spec.variant, mid, epsilon, spec.damping)
        if f_mid * f_lo > 0:
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return UnknownVector(0.5 * (lo + hi), seed_guess(spec, branch_id).h)


def anchor_for(variant, branch_id):
    return ANCHORS.get((variant, branch_id))


def trace_branch(template: ProblemSpec, branch_id: str, eps_range, step, tol=DEFAULT_TOL,
                 max_iters=DEFAULT_MAX_ITERS, on_point=None) -> TransitionCurve:
    """Trace a registered branch over ``eps_range`` (increasing).

    Branches with a tip seed start at the end of the range nearest eps = 0
    (splitting at 0 when the range straddles it). Anchored branches
    start at their anchor and are continued both ways; losing the branch
    while going down (a fold, e.g. the lifted tip of a damped tongue) ends
    that half without error, and the curve simply starts higher.
    """
    lo, hi = eps_range
    if not hi > lo:
        raise ValueError("need eps0 < eps1")
    spec = branch_spec(template, branch_id)
    anchor = anchor_for(spec.variant, branch_id)
    if anchor is None:
        # start from the tip: the end of the range closest to eps = 0
        kw = dict(tol=tol, max_iters=max_iters, on_point=on_point)
        if lo >= 0:
            return trace_curve(spec, branch_id, (lo, hi), step, **kw)
        if hi <= 0:
            return trace_curve(spec, branch_id, (hi, lo), step, **kw)
        down = trace_curve(spec, branch_id, (0.0, lo), step, **kw)
        up = trace_curve(spec, branch_id, (0.0, hi), step, **kw)
        return TransitionCurve(branch_id, down.points + up.points[1:])
    eps_a, bracket = anchor
    if not lo <= eps_a <= hi:
        raise ValueError(f"branch {branch_id} must be traced over a range containing eps={eps_a}")
    seed = oracle_seed(spec, branch_id, eps_a, bracket)
    points = []
    if eps_a > lo:
        got = []
        try:
            trace_curve(spec, branch_id, (eps_a, lo), step, seed=seed, tol=tol, max_iters=max_iters,
                        predictor="loglog", on_point=got.append)
        except BranchLost as exc:
            log.info("branch %s folds below eps=%s", branch_id, exc.last_epsilon)
        points.extend(sorted(got, key=lambda p: p.epsilon))
    if eps_a < hi:
        up = trace_curve(spec, branch_id, (eps_a, hi), step, seed=seed, tol=tol, max_iters=max_iters)
        points.extend(up.points[1:] if points else up.points)
    if on_point:
        for p in points:
            on_point(p)
    return TransitionCurve(branch_id, points)


def solve_point(template: ProblemSpec, branch_id: str, epsilon, eps_start=0.05, step=0.1,
                tol=DEFAULT_TOL) -> CurvePoint:
    """Reach ``epsilon`` by continuing the branch from its tip (or anchor)."""
    spec = branch_spec(template, branch_id)
    anchor = anchor_for(spec.variant, branch_id)
    if anchor is not None:
        eps_a, bracket = anchor
        seed = oracle_seed(spec, branch_id, eps_a, bracket)
        if epsilon == eps_a:
            return _solve_at(spec, epsilon, seed, seed.delta, window_halfwidth(spec.variant, branch_id), tol,
                             DEFAULT_MAX_ITERS)
        predictor = "loglog" if epsilon < eps_a else "secant"
        return trace_curve(spec, branch_id, (eps_a, epsilon), step, seed=seed, tol=tol,
                           predictor=predictor).points[0 if epsilon < eps_a else -1]
    if abs(epsilon) <= abs(eps_start):
        seed = seed_guess(spec, branch_id)
        return _solve_at(spec, epsilon, seed, seed.delta, window_halfwidth(spec.variant, branch_id), tol,
                         DEFAULT_MAX_ITERS)
    if epsilon > 0:
        curve = trace_curve(spec, branch_id, (eps_start, epsilon), step, tol=tol)
        return curve.points[-1]
    curve = trace_curve(spec, branch_id, (-eps_start, epsilon), step, tol=tol)
    return curve.points[0]
