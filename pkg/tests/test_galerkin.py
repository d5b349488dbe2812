import math

import pytest

from tonguetrace.galerkin import project, residual_signal, weight_norms, weight_set
from tonguetrace.ham import ProblemSpec
from tonguetrace.signal import Signal


@pytest.mark.parametrize(
    "spec",
    [
        ProblemSpec("classical", lambda1=2, branch="cos_start", order=3),
        ProblemSpec("classical", lambda1=1, branch="sin_start", order=4),
        ProblemSpec("impulsive", lambda1=1, branch="cos_start", order=3),
        ProblemSpec("impulsive", lambda1=2, branch="sin_start", order=5),
        ProblemSpec("damped", lambda1=1, branch="zeta_start", damping=0.1, order=4),
    ],
)
def test_weight_count(spec):
    ws = weight_set(spec)
    assert len(ws) == spec.order + 1
    assert ws.period == pytest.approx(2 * math.pi * spec.lambda1)
    assert all(n > 0 for n in weight_norms(ws))


def test_classical_4pi_weights_are_half_harmonics():
    ws = weight_set(ProblemSpec(order=3))
    x = Signal.cos(0.5) + Signal.cos(1.5, 0.3)
    proj = project(x, ws)
    assert proj[0] == pytest.approx(2 * math.pi)
    assert proj[1] == pytest.approx(0.3 * 2 * math.pi)
    assert proj[2] == pytest.approx(0.0, abs=1e-12)


def test_impulsive_2pi_weight_list():
    ws = weight_set(ProblemSpec("impulsive", lambda1=1, order=3)).weights
    t = 4.0
    assert ws[0](t) == pytest.approx(t)
    assert ws[1](t) == pytest.approx(math.cos(t))
    assert ws[2](t) == pytest.approx(math.cos(t))  # gated at pi
    assert ws[2](3.0) == 0.0


def test_residual_vanishes_on_exact_solution():
    spec = ProblemSpec("classical", epsilon=0.0, order=3)
    assert residual_signal(spec, Signal.cos(0.5), 0.25).is_zero()


def test_impulsive_straight_line_residual_is_empty():
    # sin t vanishes at the kick, so it solves x'' + (1 + eps sum delta) x = 0 exactly
    spec = ProblemSpec("impulsive", epsilon=2.7, lambda1=1, branch="sin_start", order=3)
    assert residual_signal(spec, Signal.sin(1), 1.0).is_zero()


def test_damped_residual_includes_damping():
    spec = ProblemSpec("damped", damping=0.2, lambda1=1, branch="zeta_start", order=2)
    r = residual_signal(spec, Signal.cos(1), 1.0)
    assert r(0.7) == pytest.approx(-0.2 * math.sin(0.7))
