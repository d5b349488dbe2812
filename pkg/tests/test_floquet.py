import math

import numpy as np
import pytest

from tonguetrace.floquet import (
    STABLE,
    UNSTABLE,
    MonodromyMatrix,
    boundary_bracketed,
    classify,
    floquet_check,
    grid_scan,
    impulsive_trace,
    integrate,
    monodromy,
    monodromy_arrays,
)


def test_identity_at_delta_one():
    m = monodromy("classical", 1.0, 0.0)
    assert np.allclose(m.m, np.eye(2), atol=1e-9)


def test_half_rotation_at_quarter():
    m = monodromy("classical", 0.25, 0.0)
    assert m.trace == pytest.approx(-2.0, abs=1e-9)


def test_damped_free_oscillator():
    m = monodromy("damped", 1.0, 0.0, c=0.1)
    mags = np.abs(m.multipliers())
    assert np.allclose(mags, math.exp(-0.1 * math.pi), atol=1e-8)
    assert classify(m, "damped") == "stable"


@pytest.mark.parametrize("d,e,c", [(0.3, 1.2, 0.0), (1.7, 2.5, 0.0), (-0.2, 0.8, 0.1), (0.9, 3.0, 0.1)])
def test_liouville(d, e, c):
    variant = "damped" if c else "classical"
    assert monodromy(variant, d, e, c).det == pytest.approx(math.exp(-2 * math.pi * c), abs=1e-6)


@pytest.mark.parametrize("d,e", [(0.3, 1.2), (1.1, 2.0)])
def test_step_halving(d, e):
    a = monodromy("classical", d, e, steps=2000).trace
    b = monodromy("classical", d, e, steps=4000).trace
    assert abs(a - b) < 1e-8


def test_classify_rules():
    rot = MonodromyMatrix(np.array([[0.0, -1.0], [1.0, 0.0]]))
    assert classify(rot, "classical") == "stable"
    hyp = MonodromyMatrix(np.array([[2.0, 1.0], [1.0, 0.5]]))  # trace 2.5, det 1
    assert classify(hyp, "classical") == "unstable"
    damp = MonodromyMatrix(np.diag([0.73, 0.73]))
    assert classify(damp, "damped") == "stable"


def test_impulsive_trace_straight_line():
    assert np.allclose(impulsive_trace(0.25, np.linspace(-4, 4, 9)), -2.0, atol=1e-12)


def test_impulsive_trace_matches_rk():
    D, E = np.meshgrid(np.linspace(-0.5, 2.0, 20), np.linspace(-4.0, 4.0, 20))
    m11, _, _, m22 = monodromy_arrays("impulsive", D, E)
    assert np.max(np.abs(m11 + m22 - impulsive_trace(D, E))) < 1e-6


def test_impulsive_zero_delta_limit():
    assert impulsive_trace(0.0, 0.3) == pytest.approx(impulsive_trace(1e-12, 0.3), abs=1e-8)
    assert impulsive_trace(0.0, 0.3) == pytest.approx(impulsive_trace(-1e-12, 0.3), abs=1e-8)


def test_wrong_jump_sign_is_detected():
    D, E = np.meshgrid(np.linspace(0.1, 2.0, 5), np.linspace(0.5, 3.0, 5))
    m11, _, _, m22 = monodromy_arrays("impulsive", D, E, jump_sign=-1.0)
    assert np.max(np.abs(m11 + m22 - impulsive_trace(D, E))) > 1e-2


def test_floquet_check_sign():
    assert floquet_check("classical", 0.25, 0.5) > 0  # inside the 4pi tongue
    assert floquet_check("classical", 0.6, 0.5) < 0


def test_integrate_free_oscillator():
    t, x = integrate("classical", 1.0, 0.0, 1.0, 0.0, 2 * math.pi, samples=50)
    assert np.allclose(x, np.cos(t), atol=1e-9)


def test_integrate_impulsive_periodic():
    # cos(t/2) vanishes at the kicks, so it solves the impulsive equation for any eps
    t, x = integrate("impulsive", 0.25, 1.3, 1.0, 0.0, 4 * math.pi, samples=81)
    assert np.allclose(x, np.cos(t / 2), atol=1e-9)


def test_single_cell_grid():
    chart = grid_scan("classical", (5.0, 5.0 + 1e-9), (0.0, 0.0), 1, 1, workers=1)
    assert chart.cells.shape == (1, 1)
    assert chart.cells[0, 0] == STABLE


def test_chart_independent_of_workers():
    a = grid_scan("classical", (-0.5, 2.1), (0.0, 4.5), 26, 45, workers=1, rows_per_task=8)
    b = grid_scan("classical", (-0.5, 2.1), (0.0, 4.5), 26, 45, workers=2, rows_per_task=8)
    assert a.cells.tobytes() == b.cells.tobytes()


def test_chart_layout_and_bracketing():
    chart = grid_scan("classical", (-0.5, 2.1), (0.0, 4.5), 53, 46, workers=1)
    assert chart.cells.shape == (46, 53)
    # near eps = 0.5 the 4pi tongue sits around delta = 0.25
    i, j = chart.cell_of(0.2, 0.5)
    assert chart.cells[j, i] == UNSTABLE
    assert boundary_bracketed(chart, 0.25 - 0.5 / 2, 0.5)
    assert not boundary_bracketed(chart, 0.6, 0.1)
