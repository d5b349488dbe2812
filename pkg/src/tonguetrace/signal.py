"""Exact arithmetic on sums of ``c * t**k * trig(m t) * H(t - a)`` plus Dirac impulses.

A :class:`Signal` is a finite linear combination of basis terms keyed by
``(power, kind, freq, step)``:

* ``power`` -- nonnegative integer exponent of ``t``;
* ``kind`` -- ``"const"``, ``"cos"`` or ``"sin"``;
* ``freq`` -- nonnegative rational frequency (``int`` or ``Fraction``);
  ``0`` only for ``"const"``;
* ``step`` -- ``None`` or the onset ``a > 0`` of a Heaviside gate.

plus Dirac impulses ``c * delta(t - a)`` keyed by location. Coefficients are
numeric scalars (float or complex). The set is closed under addition,
products, differentiation, antiderivatives and the Duhamel solution of
``x'' + w**2 x = F``; that is all the HAM recursion needs.

The Heaviside convention is right-continuous, ``H(0) = 1``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from numbers import Number

import numpy as np

from .errors import DiracProduct, ImpulseOnBoundary

CONST, COS, SIN = "const", "cos", "sin"

PRUNE_RTOL = 1e-14
# derivative-induced impulses are jump sums that vanish analytically
JUMP_RTOL = 1e-12


def _freq(m):
    if isinstance(m, Fraction) and m.denominator == 1:
        return int(m.numerator)
    return m


def _step(a):
    if a is None or a <= 0.0:
        return None
    return float(a)


def _normalize(c, power, kind, freq, step):
    """Map a raw term onto its canonical key. Returns (coeff, key) or None."""
    freq = _freq(freq)
    if kind != CONST:
        if freq < 0:
            freq = -freq
            if kind == SIN:
                c = -c
        if freq == 0:
            if kind == SIN:
                return None
            kind = CONST
    else:
        freq = 0
    return c, (power, kind, freq, _step(step))


_QUARTER_COS = (1.0, 0.0, -1.0, 0.0)
_QUARTER_SIN = (0.0, 1.0, 0.0, -1.0)


def _trig(kind, x):
    if kind == CONST:
        return 1.0
    if isinstance(x, np.ndarray):
        return np.cos(x) if kind == COS else np.sin(x)
    # scalar arguments at multiples of pi/2 (impulse and gate locations) are exact
    q = x / (0.5 * math.pi)
    r = round(q)
    if abs(q - r) <= 1e-13 * max(1.0, abs(q)):
        return (_QUARTER_COS if kind == COS else _QUARTER_SIN)[r % 4]
    return math.cos(x) if kind == COS else math.sin(x)


def _term_value(key, t):
    power, kind, freq, _ = key
    v = _trig(kind, float(freq) * t)
    if power:
        v = v * t**power
    return v


@lru_cache(maxsize=None)
def _primitive(power, kind, freq):
    """Antiderivative of ``t**power * kind(freq t)`` as ((coeff, power, kind), ...).

    Integration by parts down to power 0; the constant of integration is zero.
    """
    if kind == CONST:
        return ((1.0 / (power + 1), power + 1, CONST),)
    w = float(freq)
    if kind == COS:
        head = (1.0 / w, power, SIN)
        tail = _primitive(power - 1, SIN, freq) if power else ()
        return (head,) + tuple((-power / w * c, p, k) for c, p, k in tail)
    head = (-1.0 / w, power, COS)
    tail = _primitive(power - 1, COS, freq) if power else ()
    return (head,) + tuple((power / w * c, p, k) for c, p, k in tail)


def _primitive_value(power, kind, freq, t):
    total = 0.0
    for c, p, k in _primitive(power, kind, freq):
        v = _trig(k, float(freq) * t)
        total += c * v * (t**p if p else 1.0)
    return total


def _trig_product(k1, m1, k2, m2):
    """Product-to-sum: kind(m1 t) * kind(m2 t) -> ((factor, kind, freq), ...)."""
    if k1 == CONST:
        return ((1.0, k2, m2),)
    if k2 == CONST:
        return ((1.0, k1, m1),)
    if k1 == COS and k2 == COS:
        return ((0.5, COS, m1 - m2), (0.5, COS, m1 + m2))
    if k1 == SIN and k2 == SIN:
        return ((0.5, COS, m1 - m2), (-0.5, COS, m1 + m2))
    if k1 == SIN:  # sin a cos b
        return ((0.5, SIN, m1 + m2), (0.5, SIN, m1 - m2))
    # cos a sin b
    return ((0.5, SIN, m1 + m2), (-0.5, SIN, m1 - m2))


def _merge(x, y):
    """Sum two coefficient maps; a sum lost to cancellation is dropped."""
    out = dict(x)
    for k, c in y.items():
        if k in out:
            total = out[k] + c
            if abs(total) <= PRUNE_RTOL * max(abs(out[k]), abs(c)):
                del out[k]
            else:
                out[k] = total
        else:
            out[k] = c
    return out


def _max_step(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


class Signal:
    """Immutable element of the closed function space.

    Build signals with the class constructors (:meth:`const`, :meth:`cos`,
    :meth:`sin`, :meth:`dirac`, :meth:`monomial`) and combine them with
    ``+``, ``-`` and ``*``. Calling a signal evaluates it pointwise,
    ignoring impulses.
    """

    __slots__ = ("terms", "impulses")

    def __init__(self, terms=None, impulses=None):
        terms = {k: c for k, c in (terms or {}).items() if c != 0}
        impulses = {float(a): c for a, c in (impulses or {}).items() if c != 0}
        scale = max(
            [abs(c) for c in terms.values()] + [abs(c) for c in impulses.values()],
            default=0.0,
        )
        cut = PRUNE_RTOL * scale
        self.terms = {k: c for k, c in terms.items() if abs(c) > cut}
        self.impulses = {a: c for a, c in impulses.items() if abs(c) > cut}

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def term(cls, coeff=1.0, power=0, kind=CONST, freq=0, step=None):
        norm = _normalize(coeff, power, kind, freq, step)
        if norm is None:
            return cls()
        c, key = norm
        return cls({key: c})

    @classmethod
    def const(cls, coeff=1.0, step=None):
        return cls.term(coeff, 0, CONST, 0, step)

    @classmethod
    def cos(cls, freq=1, coeff=1.0, power=0, step=None):
        return cls.term(coeff, power, COS, freq, step)

    @classmethod
    def sin(cls, freq=1, coeff=1.0, power=0, step=None):
        return cls.term(coeff, power, SIN, freq, step)

    @classmethod
    def monomial(cls, power=1, coeff=1.0, step=None):
        return cls.term(coeff, power, CONST, 0, step)

    @classmethod
    def dirac(cls, location, coeff=1.0):
        if location <= 0:
            raise ValueError("impulse location must be positive")
        return cls({}, {float(location): coeff})

    @classmethod
    def from_terms(cls, items, impulses=()):
        """Accumulate ``(coeff, power, kind, freq, step)`` tuples and ``(a, coeff)`` pairs."""
        acc = {}
        for c, p, k, m, a in items:
            norm = _normalize(c, p, k, m, a)
            if norm is None:
                continue
            c, key = norm
            acc[key] = acc.get(key, 0.0) + c
        imp = {}
        for a, c in impulses:
            imp[float(a)] = imp.get(float(a), 0.0) + c
        return cls(acc, imp)

    # -- inspection ---------------------------------------------------------
    def __len__(self):
        return len(self.terms) + len(self.impulses)

    def is_zero(self):
        return not self.terms and not self.impulses

    @property
    def has_impulses(self):
        return bool(self.impulses)

    def coefficient(self, power=0, kind=CONST, freq=0, step=None):
        norm = _normalize(1.0, power, kind, freq, step)
        if norm is None:
            return 0.0
        sign, key = norm
        return sign * self.terms.get(key, 0.0)

    def max_abs_coeff(self):
        return max(
            [abs(c) for c in self.terms.values()] + [abs(c) for c in self.impulses.values()],
            default=0.0,
        )

    def smooth_part(self):
        return Signal(self.terms)

    def impulse_part(self):
        return Signal({}, self.impulses)

    def __repr__(self):
        if self.is_zero():
            return "Signal(0)"
        parts = []
        for (p, k, m, a), c in sorted(self.terms.items(), key=_sort_key):
            s = f"{c:+.6g}"
            if p:
                s += f"*t^{p}" if p > 1 else "*t"
            if k != CONST:
                s += f"*{k}({m}t)"
            if a is not None:
                s += f"*H(t-{a:.6g})"
            parts.append(s)
        for a, c in sorted(self.impulses.items()):
            parts.append(f"{c:+.6g}*delta(t-{a:.6g})")
        return "Signal(" + " ".join(parts) + ")"

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if isinstance(other, Number):
            other = Signal.const(other)
        if not isinstance(other, Signal):
            return NotImplemented
        return Signal(_merge(self.terms, other.terms), _merge(self.impulses, other.impulses))

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        if isinstance(other, Number):
            other = Signal.const(other)
        if not isinstance(other, Signal):
            return NotImplemented
        return self + other.scale(-1.0)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor):
        if factor == 0:
            return Signal()
        return Signal(
            {k: c * factor for k, c in self.terms.items()},
            {a: c * factor for a, c in self.impulses.items()},
        )

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.scale(other)
        if not isinstance(other, Signal):
            return NotImplemented
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, Number):
            return self.scale(other)
        return NotImplemented

    def __call__(self, t):
        return evaluate(self, t)

    # -- time change --------------------------------------------------------
    def rescale_time(self, factor):
        """Substitute ``tau = t / factor``: returns g with g(t) = self(t / factor).

        Harmonic ``m`` becomes ``m / factor``, gates and impulses move to
        ``a * factor``, and ``delta(t/factor - a) = factor * delta(t - a*factor)``.
        """
        if factor == 1:
            return self
        f = Fraction(factor)
        ff = float(factor)
        items = []
        for (p, k, m, a), c in self.terms.items():
            items.append((c / ff**p, p, k, Fraction(m) / f, None if a is None else a * ff))
        return Signal.from_terms(items, [(a * ff, c * ff) for a, c in self.impulses.items()])


def _sort_key(item):
    (p, k, m, a), _ = item
    return (a or 0.0, p, {CONST: 0, COS: 1, SIN: 2}[k], float(m))


def add(a: Signal, b: Signal) -> Signal:
    return a + b


def mul(a: Signal, b: Signal) -> Signal:
    """Exact product expanded onto the canonical basis."""
    if a.impulses and b.impulses:
        raise DiracProduct("cannot multiply two signals that both carry impulses")
    acc = {}
    for (p1, k1, m1, a1), c1 in a.terms.items():
        for (p2, k2, m2, a2), c2 in b.terms.items():
            step = _max_step(a1, a2)
            c = c1 * c2
            for f, k, m in _trig_product(k1, m1, k2, m2):
                norm = _normalize(f * c, p1 + p2, k, m, step)
                if norm is None:
                    continue
                cc, key = norm
                acc[key] = acc.get(key, 0.0) + cc
    imp = {}
    for src, other in ((a, b), (b, a)):
        for loc, c in src.impulses.items():
            v = evaluate(other, loc)
            if v != 0:
                imp[loc] = imp.get(loc, 0.0) + c * v
    return Signal(acc, imp)


def evaluate(s: Signal, t):
    """Pointwise value at scalar or array ``t``; impulses are ignored."""
    scalar = not isinstance(t, np.ndarray)
    if not scalar:
        t = np.asarray(t, dtype=float)
        total = np.zeros_like(t, dtype=complex if _is_complex(s) else float)
    else:
        total = 0.0
    for key, c in s.terms.items():
        a = key[3]
        v = c * _term_value(key, t)
        if a is not None:
            if scalar:
                if t < a:
                    continue
            else:
                v = np.where(t >= a, v, 0.0)
        total = total + v
    return total


def _is_complex(s):
    return any(isinstance(c, complex) for c in s.terms.values())


def differentiate(s: Signal) -> Signal:
    """Exact derivative; gate onsets with a nonzero jump emit Dirac terms."""
    if s.impulses:
        raise ValueError("cannot differentiate a signal carrying impulses")
    items = []
    jumps = {}
    jump_scale = {}
    for (p, k, m, a), c in s.terms.items():
        if p:
            items.append((c * p, p - 1, k, m, a))
        if k == COS:
            items.append((-c * float(m), p, SIN, m, a))
        elif k == SIN:
            items.append((c * float(m), p, COS, m, a))
        if a is not None:
            v = c * _term_value((p, k, m, a), a)
            jumps[a] = jumps.get(a, 0.0) + v
            jump_scale[a] = jump_scale.get(a, 0.0) + abs(c) * a**p
    impulses = [(a, j) for a, j in jumps.items() if abs(j) > JUMP_RTOL * jump_scale[a]]
    return Signal.from_terms(items, impulses)


def antiderivative(s: Signal) -> Signal:
    """Return ``A`` with ``A(t) = integral_0^t s`` for ``t >= 0``.

    Gated terms integrate to ``H(t-a) (P(t) - P(a))``; an impulse at ``a``
    integrates to a unit step at ``a``.
    """
    items = []
    for (p, k, m, a), c in s.terms.items():
        for cc, pp, kk in _primitive(p, k, m):
            items.append((c * cc, pp, kk, m, a))
        start = 0.0 if a is None else a
        items.append((-c * _primitive_value(p, k, m, start), 0, CONST, 0, a))
    for a, c in s.impulses.items():
        items.append((c, 0, CONST, 0, a))
    return Signal.from_terms(items)


def definite_integral(s: Signal, t0: float, t1: float):
    """Closed-form ``integral_{t0}^{t1} s(t) dt`` (impulses count if strictly inside)."""
    if not t0 < t1:
        raise ValueError("need t0 < t1")
    total = 0.0
    for (p, k, m, a), c in s.terms.items():
        lo = t0 if a is None else max(t0, a)
        if lo >= t1:
            continue
        total += c * (_primitive_value(p, k, m, t1) - _primitive_value(p, k, m, lo))
    for a, c in s.impulses.items():
        if a == t0 or a == t1:
            raise ImpulseOnBoundary(f"impulse at {a} lies on the integration boundary")
        if t0 < a < t1:
            total += c
    return total


def inner(a: Signal, b: Signal, t0: float, t1: float):
    """``integral_{t0}^{t1} a(t) b(t) dt``."""
    return definite_integral(mul(a, b), t0, t1)


def solve_sho(forcing: Signal, x0=0.0, v0=0.0, omega=1) -> Signal:
    """Unique solution of ``x'' + omega**2 x = forcing`` with ``x(0)=x0, x'(0)=v0``.

    Uses the Duhamel form
    ``x_p = (sin(w t) C(t) - cos(w t) S(t)) / w`` with
    ``C = int_0^t cos(w s) F ds`` and ``S = int_0^t sin(w s) F ds``,
    which handles resonant, gated and impulsive forcing alike.
    """
    w = float(omega)
    c_w = Signal.cos(omega)
    s_w = Signal.sin(omega)
    out = c_w.scale(x0) + s_w.scale(v0 / w)
    if not forcing.is_zero():
        big_c = antiderivative(mul(c_w, forcing))
        big_s = antiderivative(mul(s_w, forcing))
        out = out + (mul(s_w, big_c) - mul(c_w, big_s)).scale(1.0 / w)
    return out
