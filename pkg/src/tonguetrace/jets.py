"""Truncated Taylor series in the embedding parameter ``p``.

A :class:`Jet` stores Taylor coefficients ``a_n = f^(n)(0) / n!``; the
derivative-value convention ``f^(n)(0)`` used for ``x^[n]``, ``lambda^[n]``
and ``h^[n]`` is available through :meth:`Jet.derivative`. Coefficients may
be scalars or :class:`~tonguetrace.signal.Signal` objects, or a mix, as long
as their products are defined.
"""

from __future__ import annotations

from math import comb, factorial

from .errors import SlotAlreadyFixed


def _is_zero(c):
    if hasattr(c, "is_zero"):
        return c.is_zero()
    return c == 0


class Jet:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(coeffs)
        if not self.coeffs:
            raise ValueError("a jet needs at least one coefficient")

    @classmethod
    def from_derivatives(cls, values):
        return cls(v / factorial(n) for n, v in enumerate(values))

    @classmethod
    def constant(cls, value, order):
        return cls([value] + [0.0] * order)

    @classmethod
    def identity(cls, order):
        """The jet of ``p`` itself."""
        return cls([0.0, 1.0] + [0.0] * (order - 1))

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r})"

    def derivative(self, n):
        """``n``-th derivative at ``p = 0``."""
        return self.coeffs[n] * factorial(n)

    def derivatives(self):
        return [self.derivative(n) for n in range(len(self.coeffs))]

    def truncate(self, order):
        return Jet(self.coeffs[: order + 1])

    def map(self, fn):
        return Jet(fn(c) for c in self.coeffs)

    def at_one(self):
        """Partial sum at ``p = 1``."""
        total = self.coeffs[0]
        for c in self.coeffs[1:]:
            total = total + c
        return total

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet((self.coeffs[0] + other,) + self.coeffs[1:])
        m = min(self.order, other.order)
        return Jet(a + b for a, b in zip(self.coeffs[: m + 1], other.coeffs[: m + 1]))

    __radd__ = __add__

    def __neg__(self):
        return Jet(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return jet_mul(self, other)
        return Jet(c * other for c in self.coeffs)

    def __rmul__(self, other):
        return Jet(other * c for c in self.coeffs)

    def cauchy_coeff(self, other, n):
        """Order-``n`` coefficient of ``self * other`` without forming the rest."""
        return cauchy_coeff(self, other, n)


def cauchy_coeff(a: Jet, b: Jet, n: int):
    total = None
    for k in range(n + 1):
        x, y = a.coeffs[k], b.coeffs[n - k]
        if _is_zero(x) or _is_zero(y):
            continue
        term = x * y
        total = term if total is None else total + term
    return 0.0 if total is None else total


def jet_mul(a: Jet, b: Jet) -> Jet:
    """Cauchy product truncated at the smaller order."""
    m = min(a.order, b.order)
    return Jet(cauchy_coeff(a, b, n) for n in range(m + 1))


def leibniz_derivative(a: Jet, b: Jet, n: int):
    """``n``-th derivative of a product from the operands' derivative values."""
    return sum(comb(n, k) * a.derivative(k) * b.derivative(n - k) for k in range(n + 1))


def jet_linear_slot(a: Jet, n: int, fixed=None):
    """Split the order-``n`` coefficient of ``a * a`` into known part and multiplier.

    ``a`` holds determined coefficients at orders ``< n``; its order-``n``
    entry (if present) must still be the placeholder 0. Returns
    ``(known, multiplier)`` such that ``(a*a)_n = known + multiplier * a_n``
    once ``a_n`` is fixed: ``known = sum_{k=1}^{n-1} a_k a_{n-k}`` and
    ``multiplier = 2 a_0``.

    ``fixed`` optionally names the orders already fixed; asking for one of
    them raises :class:`SlotAlreadyFixed`.
    """
    if fixed is not None and n in fixed:
        raise SlotAlreadyFixed(f"order {n} coefficient is already fixed")
    if n < len(a.coeffs) and not _is_zero(a.coeffs[n]):
        raise SlotAlreadyFixed(f"order {n} coefficient is already fixed")
    if n == 0:
        raise SlotAlreadyFixed("order 0 is fixed by construction")
    known = 0.0
    for k in range(1, n):
        known += a.coeffs[k] * a.coeffs[n - k]
    return known, 2.0 * a.coeffs[0]
