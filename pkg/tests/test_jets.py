import pytest
from hypothesis import given
from hypothesis import strategies as st

from tonguetrace.errors import SlotAlreadyFixed
from tonguetrace.jets import Jet, cauchy_coeff, jet_linear_slot, jet_mul, leibniz_derivative
from tonguetrace.signal import Signal

vals = st.floats(-5, 5, allow_nan=False)


def jets(order):
    return st.lists(vals, min_size=order + 1, max_size=order + 1).map(Jet)


def test_derivative_convention():
    j = Jet.from_derivatives([1.0, 2.0, 6.0])
    assert j.coeffs == (1.0, 2.0, 3.0)
    assert j.derivative(2) == 6.0


def test_square_of_one_plus_p():
    j = Jet([1.0, 1.0, 0.0])
    assert (j * j).coeffs == (1.0, 2.0, 1.0)


def test_signal_coefficients():
    j = Jet([Signal.cos(1), Signal.sin(1)])
    sq = j * j
    assert sq[1](0.3) == pytest.approx(2 * 0.0 + 2 * __import__("math").cos(0.3) * __import__("math").sin(0.3))


def test_linear_slot():
    a = Jet([2.0, 3.0, 0.0])
    known, mult = jet_linear_slot(a, 2)
    assert known == 9.0 and mult == 4.0


def test_linear_slot_fixed_raises():
    with pytest.raises(SlotAlreadyFixed):
        jet_linear_slot(Jet([1.0, 1.0]), 1)
    with pytest.raises(SlotAlreadyFixed):
        jet_linear_slot(Jet([1.0, 0.0]), 1, fixed={1})


@given(jets(4), jets(4), jets(4))
def test_associative(a, b, c):
    lhs, rhs = (a * b) * c, a * (b * c)
    for x, y in zip(lhs.coeffs, rhs.coeffs):
        assert x == pytest.approx(y, rel=1e-12, abs=1e-9)


@given(jets(5), jets(5))
def test_leibniz(a, b):
    prod = jet_mul(a, b)
    for n in range(6):
        ref = leibniz_derivative(a, b, n)
        assert prod.derivative(n) == pytest.approx(ref, rel=1e-12, abs=1e-8)


@given(jets(5), jets(5), st.integers(0, 5))
def test_truncation_commutes(a, b, m):
    assert (a * b).truncate(m).coeffs == pytest.approx(jet_mul(a.truncate(m), b.truncate(m)).coeffs)


@given(jets(3), jets(3))
def test_cauchy_matches_product(a, b):
    for n in range(4):
        assert cauchy_coeff(a, b, n) == pytest.approx((a * b)[n])
