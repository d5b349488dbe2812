"""Residual of the original equation and its weighted projections."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .ham import ProblemSpec
from .signal import Signal, definite_integral, differentiate, mul


@dataclass(frozen=True)
class WeightSet:
    weights: tuple
    period: float

    def __len__(self):
        return len(self.weights)


def impulse_train(spec: ProblemSpec) -> Signal:
    """``sum_k delta(t - (2k+1) pi)`` over one solution period."""
    return Signal.from_terms([], [((2 * k + 1) * math.pi, 1.0) for k in range(spec.lambda1)])


def residual_signal(spec: ProblemSpec, xN: Signal, delta: float) -> Signal:
    """``x'' + (delta + eps E(t)) x (+ c x')`` for the assembled solution."""
    xp = differentiate(xN)
    out = differentiate(xp)
    if spec.variant == "impulsive":
        out = out + xN.scale(delta) + mul(xN, impulse_train(spec)).scale(spec.epsilon)
        return out
    out = out + mul(xN, Signal.const(delta) + Signal.cos(1, spec.epsilon))
    if spec.variant == "damped" and spec.damping:
        out = out + xp.scale(spec.damping)
    return out


def _interleaved(freqs, count):
    """1 (if freq 0 present), cos f1, sin f1, cos f2, sin f2, ... truncated."""
    out = []
    for f in freqs:
        if f == 0:
            out.append(Signal.const(1.0))
        else:
            out.append(Signal.cos(f))
            out.append(Signal.sin(f))
        if len(out) >= count:
            break
    return out[:count]


def _impulsive_weights(spec, count):
    pi = math.pi
    if spec.lambda1 == 1:
        ws = [Signal.monomial(1), Signal.cos(1)]
        gates = [pi]
    else:
        ws = [Signal.monomial(1), Signal.cos(1, power=1)]
        gates = [pi, 3 * pi]
    for a in gates:
        ws += [Signal.cos(1, step=a), Signal.sin(1, step=a)]
    # continuation past the listed weights: gated higher harmonics
    m = 2
    while len(ws) < count:
        for a in gates:
            ws += [Signal.cos(m, step=a), Signal.sin(m, step=a)]
        m += 1
    return ws[:count]


def weight_set(spec: ProblemSpec) -> WeightSet:
    """The ``N+1`` weighting functions for the spec's variant and branch."""
    count = spec.order + 1
    L = spec.lambda1
    if spec.variant == "impulsive":
        ws = _impulsive_weights(spec, count)
    elif spec.variant == "damped":
        freqs = [Fraction(0)] + [Fraction(2 * k + 1, 2) if L == 2 else Fraction(k + 1) for k in range(count)]
        if L == 2:
            freqs = freqs[1:]
        ws = _interleaved(freqs, count)
    elif L == 2:
        kind = Signal.cos if spec.branch == "cos_start" else Signal.sin
        ws = [kind(Fraction(2 * k + 1, 2)) for k in range(count)]
    elif spec.branch == "cos_start":
        ws = [Signal.const(1.0)] + [Signal.cos(k) for k in range(1, count)]
    else:
        ws = [Signal.sin(k) for k in range(1, count + 1)]
    return WeightSet(tuple(ws), spec.period)


def project(residual: Signal, ws: WeightSet):
    """Exact weighted integrals over ``[0, period]``."""
    return [definite_integral(mul(w, residual), 0.0, ws.period) for w in ws.weights]


def weight_norms(ws: WeightSet):
    return [math.sqrt(definite_integral(mul(w, w), 0.0, ws.period)) for w in ws.weights]
