import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from paper_formulas import impulsive_x3_printed
from tonguetrace.errors import ComplexRootInRealMode
from tonguetrace.ham import ProblemSpec, UnknownVector, run_expansion
from tonguetrace.signal import differentiate

TAU = np.linspace(0.0, 2 * math.pi, 41)


def expand(variant="classical", eps=0.7, delta=0.3, h=(-0.8, 0.2, -0.1, 0.05), **kw):
    spec = ProblemSpec(variant, epsilon=eps, order=len(h) - 1, **kw)
    return run_expansion(spec, UnknownVector(delta, tuple(h)))


# -- classical 4pi, cos start ------------------------------------------------


def test_classical_first_order():
    e, d, h1 = 0.7, 0.3, -0.8
    sol = expand(eps=e, delta=d)
    assert sol.lambda_orders[0] == pytest.approx(h1 / 2 * (-1 + d + e / 2), rel=1e-13)
    ref = e * h1 / 16 * (np.cos(TAU) - np.cos(3 * TAU))
    assert np.allclose(sol.x_orders[1](TAU), ref, atol=1e-13)


def test_classical_second_order():
    e, d, h1, h2 = 0.7, 0.3, -0.8, 0.2
    sol = expand(eps=e, delta=d)
    lam2 = (h1 + h2 / 2) * (-1 + d + e / 2) + h1**2 / 4 * (-1 - 2 * d - e + 3 * d**2 + 3 * e * d + 5 * e**2 / 8)
    assert sol.lambda_orders[1] == pytest.approx(lam2, rel=1e-12)
    x2 = e / 8 * (
        (h1 + h2 / 2 + 29 * e * h1**2 / 48 + d * h1**2) * np.cos(TAU)
        - (h1 + h2 / 2 + 5 * e * h1**2 / 8 + d * h1**2) * np.cos(3 * TAU)
        + e * h1**2 / 48 * np.cos(5 * TAU)
    )
    assert np.allclose(sol.x_orders[2](TAU), x2, atol=1e-12)


def test_zero_eps_is_exact():
    # eps=0, delta=1/4: every higher order vanishes and x_N = cos(t/2)
    sol = expand(eps=0.0, delta=0.25, h=(-1.0, 0.0, 0.0, 0.0))
    t = np.linspace(0, 4 * math.pi, 50)
    assert np.allclose(sol.xN(t), np.cos(t / 2), atol=1e-14)


def test_initial_conditions_of_higher_orders():
    sol = expand()
    for x in sol.x_taylor[1:]:
        assert x(0.0) == pytest.approx(0.0, abs=1e-13)
        assert differentiate(x)(0.0) == pytest.approx(0.0, abs=1e-13)


def test_order_count():
    sol = expand()
    assert len(sol.x_taylor) == 4
    assert len(sol.lambda_taylor) == 4


def test_wrong_h_length():
    with pytest.raises(ValueError):
        run_expansion(ProblemSpec(order=3), UnknownVector(0.25, (-1.0, 0.0)))


@given(st.floats(0.1, 3.0), st.floats(-0.5, 2.0), st.floats(-1.5, -0.1), st.floats(-1, 1), st.floats(-1, 1))
@settings(max_examples=30, deadline=None)
def test_orders_are_secular_free(e, d, h1, h2, h3):
    for lam1, branch in ((2, "cos_start"), (2, "sin_start"), (1, "cos_start"), (1, "sin_start")):
        sol = expand(eps=e, delta=d, h=(h1, h2, h3, 0.1), lambda1=lam1, branch=branch)
        assert max(sol.resonant_content) < 1e-10


def test_residual_map_is_deterministic():
    a = expand().xN
    b = expand().xN
    assert (a - b).max_abs_coeff() == 0.0


# -- impulsive ---------------------------------------------------------------


def test_impulsive_2pi_first_order():
    e, D, h1 = 1.3, 0.4, -0.7
    sol = expand("impulsive", eps=e, delta=D, h=(h1, 0.1, 0.0, 0.0), lambda1=1)
    assert sol.lambda_orders[0] == pytest.approx(h1 / 2 * (-1 + D + e / math.pi), rel=1e-13)
    tau = TAU[TAU != math.pi]
    ref = e * h1 / 2 * (2 * (tau >= math.pi) - tau / math.pi) * np.sin(tau)
    assert np.allclose(sol.x_orders[1](tau), ref, atol=1e-13)


def test_impulsive_4pi_first_order():
    e, D, h1 = 1.0, -0.2, -0.9
    sol = expand("impulsive", eps=e, delta=D, h=(h1, 0.0, 0.0, 0.0), lambda1=2, branch="sin_start")
    assert sol.lambda_orders[0] == pytest.approx(h1 / 2 * (-1 + D + e / math.pi), rel=1e-13)
    tau = np.linspace(0.01, 2 * math.pi - 0.01, 60)
    H1 = (tau >= math.pi / 2).astype(float)
    H3 = (tau >= 3 * math.pi / 2).astype(float)
    ref = e * h1 / 2 * (-H3 - H1 + tau / math.pi) * np.cos(tau) - e * h1 / (2 * math.pi) * np.sin(tau)
    assert np.allclose(sol.x_orders[1](tau), ref, atol=1e-13)


def _x3(rng):
    D = float(rng.uniform(-0.5, 2.0))
    e = float(rng.uniform(-3.0, 3.0))
    h = tuple(float(v) for v in rng.uniform(-1.5, 1.5, 3))
    sol = expand("impulsive", eps=e, delta=D, h=h + (0.0,), lambda1=1)
    t = rng.uniform(0.0, 2 * math.pi, 100)
    return t, sol.xN(t), (D, e) + h


def test_impulsive_x3_matches_corrected_closed_form():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        t, got, args = _x3(rng)
        worst = max(worst, np.max(np.abs(got - impulsive_x3_printed(t, *args, h1h2_den=2))))
    assert worst < 1e-8


def test_impulsive_x3_printed_differs_in_one_term_only():
    # the printed h1 h2 term carries 12 pi where the expansion gives 2 pi
    rng = np.random.default_rng(8)
    for _ in range(5):
        t, got, (D, e, h1, h2, h3) = _x3(rng)
        gap = got - impulsive_x3_printed(t, D, e, h1, h2, h3)
        a = 2 * math.pi * D + e
        coeff = e * a * h1 * h2 * (1 / (2 * math.pi) - 1 / (12 * math.pi))
        term = coeff * np.sin(t) * (t >= math.pi)
        assert np.allclose(gap, term, atol=1e-9)


# -- damped (2pi, zeta start) ------------------------------------------------


def damped(e=1.0, d=0.4, c=0.1, h=(-0.8, 0.3, 0.0), root="minus"):
    spec = ProblemSpec("damped", epsilon=e, damping=c, lambda1=1, branch="zeta_start",
                       order=len(h) - 1, zeta0_root=root)
    return run_expansion(spec, UnknownVector(d, h))


@pytest.mark.parametrize("root,sign", [("minus", -1), ("plus", 1)])
def test_damped_zeta0_and_lambda1(root, sign):
    e, d, c, h1 = 1.0, 0.4, 0.1, -0.8
    sol = damped(e, d, c, root=root)
    z0 = (e + sign * math.sqrt(e * e - 4 * c * c * h1 * h1)) / (2 * c * h1)
    assert sol.zeta0 == pytest.approx(z0, rel=1e-12)
    lam1 = 0.5 * (-e + (-1 + d + c * z0) * h1)
    assert sol.lambda_orders[0] == pytest.approx(lam1, rel=1e-12)


def test_damped_first_order_and_zeta1():
    e, d, c, h1, h2 = 1.0, 0.4, 0.1, -0.8, 0.3
    sol = damped(e, d, c, h=(h1, h2, 0.0))
    z0 = sol.zeta0
    z1 = sol.zeta_orders[1]
    ref_z1 = (
        (3 * c * c * z0**3 + (d + 2 * e - 1) * 3 * c * z0**2 + (c * c + e * e) * 3 * z0 + 3 * c * d - 2 * c * e - 3 * c)
        * h1**2
        - (3 * c * z0**2 + 4 * z0 * e + 3 * c) * e * h1
        + (z0**2 + 1) * 3 * c * h2
        + 6 * e * z0
    ) / (6 * (e - 2 * c * h1 * z0))
    assert z1 == pytest.approx(ref_z1, rel=1e-10)
    x1 = (-e * h1 / 3 * np.cos(TAU) - e * h1 / 6 * np.cos(2 * TAU) + (e * z0 * h1 / 3 + z1) * np.sin(TAU)
          - e * z0 * h1 / 6 * np.sin(2 * TAU) + e * h1 / 2)
    assert np.allclose(sol.x_orders[1](TAU), x1, atol=1e-12)
    lam2 = (-e * e / 4 + (-1 + d - e / 2 - e * e / 3 - d * e / 2 + c * z0 + c * z1) * h1
            + 0.5 * (-1 + d + c * z0) * h2
            + (-0.25 - d / 2 + 5 * e * e / 12 + 3 * d * d / 4 + c * c * z0 * z0 / 4 + c * d * z0
               + 2 * c * e * z0 / 3) * h1**2)
    assert sol.lambda_orders[1] == pytest.approx(lam2, rel=1e-10)


def test_damped_complex_root_needs_complex_mode():
    # eps^2 < 4 c^2 h1^2
    with pytest.raises(ComplexRootInRealMode):
        damped(e=0.1, c=0.1, h=(-2.0, 0.0, 0.0))
    spec = ProblemSpec("damped", epsilon=0.1, damping=0.1, lambda1=1, branch="zeta_start", order=2,
                       field_mode="complex")
    sol = run_expansion(spec, UnknownVector(0.4, (-2.0, 0.0, 0.0)))
    assert abs(complex(sol.zeta0).imag) > 0


def test_spec_validation():
    with pytest.raises(ValueError):
        ProblemSpec("damped", branch="cos_start")
    with pytest.raises(ValueError):
        ProblemSpec("classical", branch="zeta_start")
    with pytest.raises(ValueError):
        ProblemSpec(lambda1=3)
    assert ProblemSpec(lambda0=2).experimental
