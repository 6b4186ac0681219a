"""First- and second-order jets of scalar profiles of one variable.

A Jet carries (value, d/dr, d2/dr2) as numpy arrays and propagates them
through arithmetic, so radial profiles such as sinh(r)^2 / r^2 get exact
derivatives without hand-written formulas.
"""

from __future__ import annotations

import numpy as np


class Jet:
    """Truncated second-order Taylor data of a scalar function of one variable."""

    __slots__ = ("v", "d", "h")

    def __init__(self, v, d, h):
        self.v = np.asarray(v, dtype=float)
        self.d = np.asarray(d, dtype=float)
        self.h = np.asarray(h, dtype=float)

    # ---- arithmetic -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.v + other.v, self.d + other.d, self.h + other.h)
        return Jet(self.v + other, self.d, self.h)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.v, -self.d, -self.h)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -np.asarray(other, dtype=float))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            return Jet(
                self.v * other.v,
                self.d * other.v + self.v * other.d,
                self.h * other.v + 2.0 * self.d * other.d + self.v * other.h,
            )
        return Jet(self.v * other, self.d * other, self.h * other)

    __rmul__ = __mul__

    def reciprocal(self):
        iv = 1.0 / self.v
        return Jet(iv, -self.d * iv**2, (2.0 * self.d**2 * iv - self.h) * iv**2)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        # real exponent; values must stay in the domain of r**p
        v, d, h = self.v, self.d, self.h
        vp = v**p
        vp1 = v ** (p - 1)
        vp2 = v ** (p - 2)
        return Jet(vp, p * vp1 * d, p * (p - 1) * vp2 * d**2 + p * vp1 * h)


def seed(r) -> Jet:
    """The identity jet of the radial variable itself."""
    r = np.asarray(r, dtype=float)
    return Jet(r, np.ones_like(r), np.zeros_like(r))


def const(c, like) -> Jet:
    base = np.zeros_like(np.asarray(like, dtype=float))
    return Jet(base + c, base, base)


def _compose(u: Jet, f, df, d2f) -> Jet:
    return Jet(f(u.v), df(u.v) * u.d, d2f(u.v) * u.d**2 + df(u.v) * u.h)


def sinh(u: Jet) -> Jet:
    return _compose(u, np.sinh, np.cosh, np.sinh)


def cosh(u: Jet) -> Jet:
    return _compose(u, np.cosh, np.sinh, np.cosh)


def exp(u: Jet) -> Jet:
    return _compose(u, np.exp, np.exp, np.exp)


def log(u: Jet) -> Jet:
    return _compose(u, np.log, lambda v: 1.0 / v, lambda v: -1.0 / v**2)


def sqrt(u: Jet) -> Jet:
    return u**0.5


def where(mask, a: Jet, b: Jet) -> Jet:
    return Jet(
        np.where(mask, a.v, b.v),
        np.where(mask, a.d, b.d),
        np.where(mask, a.h, b.h),
    )
