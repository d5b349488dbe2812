"""Order-by-order homotopy analysis for Mathieu-type oscillators.

All parameters (delta, epsilon, the convergence-control derivatives h^[k])
are numeric here; the outer solver recovers the dependence on them by
evaluating :func:`run_expansion` repeatedly.

Internally every series is held in Taylor-coefficient form
(``X_n = x^[n] / n!``); the public :class:`HamSolution` reports the
derivative-value convention as well.

The deformation equation of order ``n`` is read off the homotopy

    (1 - p) (x'' + lam(p)^2 x)
      - h(p) (x'' + lam(p)^2 (delta + eps E(tau)) x + c lam(p) x')
      + eps p (1 - p) cos(lam0 tau)          [damped only]
    = 0

with the excitation ``E`` frozen at ``p = 1`` (``cos(L tau)`` for the smooth
variants, impulses at ``(2k+1) pi / L`` of weight ``1/L`` for the impulsive
one, restricted to a single period).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from math import factorial

from .errors import ComplexRootInRealMode, SingularSecularSystem
from .jets import Jet, cauchy_coeff, jet_linear_slot
from .signal import COS, SIN, Signal, definite_integral, differentiate, mul, solve_sho

VARIANTS = ("classical", "damped", "impulsive")
# impulsive secular window in tau: one solution period, i.e. t in [0, 2 pi lambda(1)]
SECULAR_WINDOW = 2.0 * math.pi
BRANCHES = ("cos_start", "sin_start", "zeta_start")


@dataclass(frozen=True)
class ProblemSpec:
    """Oscillator variant plus the expansion switches.

    ``delta`` is only a default; the value used by :func:`run_expansion`
    comes from the :class:`UnknownVector`.
    """

    variant: str = "classical"
    epsilon: float = 0.0
    delta: float = 0.25
    damping: float = 0.0
    lambda1: int = 2
    lambda0: int = 1
    branch: str = "cos_start"
    order: int = 3
    zeta0_root: str = "minus"
    field_mode: str = "real"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.branch not in BRANCHES:
            raise ValueError(f"unknown branch {self.branch!r}")
        if self.variant == "damped" and self.branch != "zeta_start":
            raise ValueError("the damped variant requires branch='zeta_start'")
        if self.variant != "damped" and self.branch == "zeta_start":
            raise ValueError("zeta_start is only valid for the damped variant")
        if self.lambda1 not in (1, 2):
            raise ValueError("lambda1 must be 1 or 2")
        if self.lambda0 < 1:
            raise ValueError("lambda0 must be >= 1")
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if self.zeta0_root not in ("minus", "plus"):
            raise ValueError("zeta0_root must be 'minus' or 'plus'")
        if self.field_mode not in ("real", "complex"):
            raise ValueError("field_mode must be 'real' or 'complex'")
        if self.damping < 0:
            raise ValueError("damping must be nonnegative")

    @property
    def period(self):
        """Target period in t."""
        return 2.0 * math.pi * self.lambda1

    @property
    def experimental(self):
        return self.lambda0 != 1


@dataclass(frozen=True)
class UnknownVector:
    """``delta`` plus ``h^[1] .. h^[N+1]`` in derivative-value convention."""

    delta: float
    h: tuple

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(self.h))

    def to_list(self):
        return [self.delta, *self.h]

    @classmethod
    def from_list(cls, values):
        values = list(values)
        return cls(values[0], tuple(values[1:]))


@dataclass
class AffineForcing:
    """Forcing of the order-``n`` Taylor coefficient ``X_n``.

    ``F = base + lam_n * dir_lambda + z * dir_zeta`` where ``lam_n`` is the
    Taylor coefficient of lambda at order ``n`` and ``z`` the Taylor
    coefficient of zeta at order ``n-1``. At ``n = 1`` in the damped variant
    the forcing is bilinear in (zeta0, lam_1); it is then carried as
    ``zeta0_parts = (F_cos, F_sin)`` with ``F = F_cos + zeta0 F_sin
    + lam_1 dir_lambda(zeta0)``.
    """

    n: int
    base: Signal | None
    dir_lambda: Signal | None
    dir_zeta: Signal | None = None
    zeta0_parts: tuple | None = None
    slot_multiplier: float = 2.0


@dataclass
class HamSolution:
    spec: ProblemSpec
    unknowns: UnknownVector
    x_taylor: list  # X_0..X_N (tau domain, Taylor coefficients)
    forcings: list  # resolved forcing of X_1..X_N (Taylor convention)
    lambda_taylor: list  # Lambda_1..Lambda_{N+1}
    zeta_taylor: list  # z_0..z_N (damped only)
    xN: Signal  # assembled solution in t
    lambda_residual: float
    resonant_content: list = field(default_factory=list)

    @property
    def x_orders(self):
        return [x.scale(factorial(n)) if n else x for n, x in enumerate(self.x_taylor)]

    @property
    def lambda_orders(self):
        return [lam * factorial(n) for n, lam in enumerate(self.lambda_taylor, start=1)]

    @property
    def zeta_orders(self):
        return [z * factorial(n) for n, z in enumerate(self.zeta_taylor)]

    @property
    def zeta0(self):
        return self.zeta_taylor[0] if self.zeta_taylor else None


# -- building blocks --------------------------------------------------------


def excitation(spec: ProblemSpec) -> Signal:
    """Frozen excitation ``E(tau)`` (without the factor epsilon)."""
    L = spec.lambda1
    if spec.variant == "impulsive":
        return Signal.from_terms([], [((2 * k + 1) * math.pi / L, 1.0 / L) for k in range(L)])
    return Signal.cos(L)


def zeroth_solution(spec: ProblemSpec, zeta0=None) -> Signal:
    """``cos``, ``sin`` or ``cos + zeta0 sin`` at frequency lambda0.

    For the damped variant with ``zeta0=None`` only the cosine part is
    returned; ``zeta0`` is fixed at order one.
    """
    w = spec.lambda0
    if spec.branch == "cos_start":
        return Signal.cos(w)
    if spec.branch == "sin_start":
        return Signal.sin(w, 1.0 / w)
    base = Signal.cos(w)
    if zeta0 is not None:
        base = base + Signal.sin(w, zeta0 / w)
    return base


def _resonant_weight(spec):
    w = spec.lambda0
    if spec.branch == "sin_start":
        return Signal.sin(w)
    return Signal.cos(w)


@dataclass
class _State:
    """Resolved orders < n, kept together with derivatives."""

    x: list
    xpp: list
    xp: list
    lam: list  # Taylor coefficients, lam[0] = lambda0
    zeta: list
    forcings: list


def _with_derivatives(x: Signal, damped: bool):
    xp = differentiate(x)
    if xp.has_impulses:
        # a jump in x itself would leave a delta' in x''
        raise ValueError("HAM order solution is discontinuous")
    return differentiate(xp), (xp if damped else None)


def _linear_rhs(spec, n, xs, xpps, xps, lam, h, modulation):
    """``-H_n`` for the homotopy without the auxiliary term, with X_n = 0, Lam_n = 0.

    ``xs``/``xpps``/``xps`` hold orders ``0..n-1``; ``lam`` is a scalar jet
    of order ``n`` whose order-``n`` entry is the placeholder 0.
    """
    zero = Signal()
    xj = Jet(list(xs) + [zero])
    ppj = Jet(list(xpps) + [zero])
    lam2 = lam * lam
    c = spec.damping if spec.variant == "damped" else 0.0
    xm = Jet([mul(x, modulation) for x in xs] + [zero])

    def a_coeff(j):
        return ppj[j] + cauchy_coeff(lam2, xj, j)

    def b_coeff(j):
        val = ppj[j] + cauchy_coeff(lam2, xm, j)
        if c:
            damp = cauchy_coeff(lam, Jet(list(xps) + [zero]), j)
            if isinstance(damp, Signal):
                val = val + damp.scale(c)
        return val

    total = a_coeff(n) - a_coeff(n - 1)
    for k in range(1, n + 1):
        hk = h[k]
        if hk == 0:
            continue
        total = total - b_coeff(n - k).scale(hk)
    return total.scale(-1.0)


def _aux_rhs(spec, n):
    """``-`` (order-n coefficient of eps p (1-p) cos(lam0 tau))."""
    if spec.variant != "damped" or spec.epsilon == 0:
        return Signal()
    if n == 1:
        return Signal.cos(spec.lambda0, -spec.epsilon)
    if n == 2:
        return Signal.cos(spec.lambda0, spec.epsilon)
    return Signal()


def _jets(spec, state, u, n):
    lam = Jet(list(state.lam) + [0.0])
    h_taylor = [0.0] + [hk / factorial(k) for k, hk in enumerate(u.h[:n], start=1)]
    h_taylor += [0.0] * (n + 1 - len(h_taylor))
    return lam, Jet(h_taylor)


def deformation_rhs(spec: ProblemSpec, n: int, state: _State, u: UnknownVector) -> AffineForcing:
    """Forcing of the order-``n`` deformation equation, affine in the unknowns."""
    lam, h = _jets(spec, state, u, n)
    modulation = Signal.const(u.delta) + excitation(spec).scale(spec.epsilon)
    _, multiplier = jet_linear_slot(lam, n)
    damped = spec.variant == "damped"
    w = spec.lambda0

    if damped and n == 1:
        parts = []
        for x0 in (Signal.cos(w), Signal.sin(w, 1.0 / w)):
            xpp, xp = _with_derivatives(x0, True)
            parts.append(_linear_rhs(spec, 1, [x0], [xpp], [xp], lam, h, modulation))
        parts[0] = parts[0] + _aux_rhs(spec, 1)
        return AffineForcing(1, None, None, zeta0_parts=tuple(parts), slot_multiplier=multiplier)

    base = _linear_rhs(spec, n, state.x, state.xpp, state.xp, lam, h, modulation)
    base = base + _aux_rhs(spec, n)
    dir_lambda = state.x[0].scale(-multiplier)
    dir_zeta = None
    if damped:
        # X_{n-1} = P + z sin(w tau)/w with z its initial velocity
        unit = Signal.sin(w, 1.0 / w)
        xpp, xp = _with_derivatives(unit, True)
        zero = Signal()
        xs = [zero] * (n - 1) + [unit]
        xpps = [zero] * (n - 1) + [xpp]
        xps = [zero] * (n - 1) + [xp]
        dir_zeta = _linear_rhs(spec, n, xs, xpps, xps, lam, h, modulation)
    return AffineForcing(n, base, dir_lambda, dir_zeta, slot_multiplier=multiplier)


def _resonant_coeffs(spec, f: Signal):
    w = spec.lambda0
    return f.coefficient(0, COS, w), f.coefficient(0, SIN, w)


def _drop_resonant(spec, f: Signal, kinds):
    w = spec.lambda0
    terms = {k: c for k, c in f.terms.items() if not (k[0] == 0 and k[2] == w and k[3] is None and k[1] in kinds)}
    return Signal(terms, f.impulses)


def _sqrt(value, mode):
    if mode == "complex" or isinstance(value, complex):
        return cmath.sqrt(value)
    if value < 0:
        raise ComplexRootInRealMode(f"zeta0 discriminant {value:.6g} < 0 in real mode")
    return math.sqrt(value)


def _solve_zeta0(spec, f: AffineForcing):
    """Order-one damped secular removal: quadratic in zeta0, then lambda_1.

    With ``F = A + z B - m lam (cos + z sin)`` (``A``, ``B`` the cosine and
    sine parts, ``m`` the slot multiplier) the cos/sin coefficients give
    ``m lam = a_c + z b_c`` and ``b_c z^2 + (a_c - w b_s) z - w a_s = 0``
    (``w`` = lambda0; the sine part of ``X_0`` is ``z sin(w tau) / w``).
    ``minus`` selects ``(-q1 - sqrt(D)) / (2 q2)``.
    """
    fc, fs = f.zeta0_parts
    a_c, a_s = _resonant_coeffs(spec, fc)
    b_c, b_s = _resonant_coeffs(spec, fs)
    w = spec.lambda0
    q2, q1, q0 = b_c, a_c - w * b_s, -w * a_s
    if abs(q2) < 1e-300:
        if q1 == 0:
            raise SingularSecularSystem("zeta0 equation is degenerate")
        z = -q0 / q1
    else:
        disc = q1 * q1 - 4.0 * q2 * q0
        root = _sqrt(disc, spec.field_mode)
        sign = -1.0 if spec.zeta0_root == "minus" else 1.0
        z = (-q1 + sign * root) / (2.0 * q2)
    m = f.slot_multiplier
    lam = (a_c + z * b_c) / m
    x0 = zeroth_solution(spec, z)
    resolved = fc + fs.scale(z) + x0.scale(-m * lam)
    return lam, z, _drop_resonant(spec, resolved, (COS, SIN))


def remove_secular_taylor(spec: ProblemSpec, f: AffineForcing):
    """Fix the order-``n`` unknowns in Taylor convention.

    Returns ``(Lambda_n, z_{n-1} or None, resolved forcing)``.
    """
    if f.zeta0_parts is not None:
        return _solve_zeta0(spec, f)
    if spec.variant == "impulsive":
        weight = _resonant_weight(spec)
        num = definite_integral(mul(weight, f.base), 0.0, SECULAR_WINDOW)
        den = definite_integral(mul(weight, f.dir_lambda), 0.0, SECULAR_WINDOW)
        if den == 0:
            raise SingularSecularSystem("windowed secular integral is degenerate")
        lam = -num / den
        return lam, None, f.base + f.dir_lambda.scale(lam)
    if spec.variant == "classical":
        kind = COS if spec.branch == "cos_start" else SIN
        w = spec.lambda0
        b = f.base.coefficient(0, kind, w)
        d = f.dir_lambda.coefficient(0, kind, w)
        if d == 0:
            raise SingularSecularSystem("lambda direction has no resonant content")
        lam = -b / d
        return lam, None, _drop_resonant(spec, f.base + f.dir_lambda.scale(lam), (kind,))
    # damped, n >= 2: 2x2 system in (Lambda_n, z_{n-1})
    b_c, b_s = _resonant_coeffs(spec, f.base)
    l_c, l_s = _resonant_coeffs(spec, f.dir_lambda)
    z_c, z_s = _resonant_coeffs(spec, f.dir_zeta)
    det = l_c * z_s - l_s * z_c
    scale = max(abs(l_c), abs(l_s), 1.0) * max(abs(z_c), abs(z_s), 1e-300)
    if abs(det) <= 1e-14 * scale:
        raise SingularSecularSystem(f"secular system singular at order {f.n} (det={det:.3g})")
    lam = (-b_c * z_s + b_s * z_c) / det
    z = (-l_c * b_s + l_s * b_c) / det
    resolved = f.base + f.dir_lambda.scale(lam) + f.dir_zeta.scale(z)
    return lam, z, _drop_resonant(spec, resolved, (COS, SIN))


def remove_secular(spec: ProblemSpec, n: int, f: AffineForcing):
    """Secular removal reported in derivative-value convention.

    Returns ``(lambda^[n], zeta^[n-1] or None, resolved forcing)``; the
    resolved forcing drives the Taylor coefficient ``x^[n] / n!``.
    """
    lam, z, resolved = remove_secular_taylor(spec, f)
    zeta = None if z is None else z * factorial(n - 1)
    return lam * factorial(n), zeta, resolved


def resonant_content(spec: ProblemSpec, resolved: Signal) -> float:
    """Size of what secular removal was meant to cancel (0 when clean)."""
    if spec.variant == "impulsive":
        return abs(definite_integral(mul(_resonant_weight(spec), resolved), 0.0, SECULAR_WINDOW))
    c, s = _resonant_coeffs(spec, resolved)
    if spec.variant == "classical":
        return abs(c) if spec.branch == "cos_start" else abs(s)
    return max(abs(c), abs(s))


def run_expansion(spec: ProblemSpec, u: UnknownVector) -> HamSolution:
    """Run orders ``1..N+1``; solve for ``X_1..X_N``; assemble ``x_N(t)``."""
    N = spec.order
    if len(u.h) != N + 1:
        raise ValueError(f"expected {N + 1} convergence-control values, got {len(u.h)}")
    damped = spec.variant == "damped"
    w = spec.lambda0

    x0 = zeroth_solution(spec)
    xpp0, xp0 = _with_derivatives(x0, damped)
    state = _State([x0], [xpp0], [xp0], [float(w)], [], [])
    resonance = []

    for n in range(1, N + 2):
        f = deformation_rhs(spec, n, state, u)
        lam_n, z, resolved = remove_secular_taylor(spec, f)
        resonance.append(resonant_content(spec, resolved))
        if damped:
            if n == 1:
                state.x[0] = zeroth_solution(spec, z)
            else:
                unit = Signal.sin(w, z / w)
                state.x[n - 1] = state.x[n - 1] + unit
            state.xpp[n - 1], state.xp[n - 1] = _with_derivatives(state.x[n - 1], True)
            state.zeta.append(z)
        state.lam.append(lam_n)
        if n <= N:
            xn = solve_sho(resolved, 0.0, 0.0, omega=w)
            xpp, xp = _with_derivatives(xn, damped)
            state.x.append(xn)
            state.xpp.append(xpp)
            state.xp.append(xp)
            state.forcings.append(resolved)

    lam_sum = sum(state.lam)
    total = state.x[0]
    for xn in state.x[1:]:
        total = total + xn
    xN = total.rescale_time(spec.lambda1)
    return HamSolution(
        spec=spec,
        unknowns=u,
        x_taylor=list(state.x),
        forcings=list(state.forcings),
        lambda_taylor=list(state.lam[1:]),
        zeta_taylor=list(state.zeta),
        xN=xN,
        lambda_residual=spec.lambda1 - lam_sum,
        resonant_content=resonance,
    )
