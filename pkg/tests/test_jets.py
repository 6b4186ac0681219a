"""Scalar 2-jet arithmetic against independently derived sympy derivatives."""

import numpy as np
import pytest
import sympy as sp

from halfmass import jets


def _oracle(expr, sym):
    f = sp.lambdify(sym, expr, "numpy")
    d1 = sp.lambdify(sym, sp.diff(expr, sym), "numpy")
    d2 = sp.lambdify(sym, sp.diff(expr, sym, 2), "numpy")
    return f, d1, d2


r_sym = sp.Symbol("r", positive=True)

CASES = [
    ("rational", lambda rj: (rj**2 + 1.0) / (rj**3 + 2.0),
     (r_sym**2 + 1) / (r_sym**3 + 2)),
    ("sinh_ratio", lambda rj: jets.sinh(rj) / rj, sp.sinh(r_sym) / r_sym),
    ("cosh_mix", lambda rj: jets.cosh(rj) * rj - 3.0 * rj,
     sp.cosh(r_sym) * r_sym - 3 * r_sym),
    ("exp_decay", lambda rj: jets.exp(-2.0 * rj) * rj**2,
     sp.exp(-2 * r_sym) * r_sym**2),
    ("log_sqrt", lambda rj: jets.log(rj) + jets.sqrt(rj + 1.0),
     sp.log(r_sym) + sp.sqrt(r_sym + 1)),
    ("neg_power", lambda rj: 2.0 * rj ** (-1.5) - rj ** 3,
     2 * r_sym ** sp.Rational(-3, 2) - r_sym**3),
    ("reciprocal", lambda rj: 1.0 / (jets.cosh(rj) + 1.0),
     1 / (sp.cosh(r_sym) + 1)),
]


@pytest.mark.parametrize("name,build,expr", CASES, ids=[c[0] for c in CASES])
def test_jet_value_and_two_derivatives(name, build, expr):
    rng = np.random.default_rng(11)
    r = rng.uniform(0.5, 4.0, size=64)
    jet = build(jets.seed(r))
    f, d1, d2 = _oracle(expr, r_sym)
    assert np.allclose(jet.v, f(r), rtol=1e-12, atol=1e-12)
    assert np.allclose(jet.d, d1(r), rtol=1e-11, atol=1e-12)
    assert np.allclose(jet.h, d2(r), rtol=1e-10, atol=1e-11)


def test_seed_is_identity_jet():
    r = np.array([0.3, 2.0])
    jet = jets.seed(r)
    assert np.array_equal(jet.v, r)
    assert np.all(jet.d == 1.0)
    assert np.all(jet.h == 0.0)


def test_const_has_zero_derivatives():
    r = np.linspace(1.0, 2.0, 5)
    c = jets.const(3.5, like=r)
    assert np.all(c.v == 3.5)
    assert np.all(c.d == 0.0) and np.all(c.h == 0.0)


def test_where_selects_branchwise():
    r = np.array([0.5, 1.5, 2.5])
    a = jets.sinh(jets.seed(r))
    b = jets.seed(r) ** 2
    mixed = jets.where(r > 1.0, a, b)
    assert mixed.v[0] == b.v[0] and mixed.d[0] == b.d[0]
    assert mixed.v[1] == a.v[1] and mixed.h[2] == a.h[2]


def test_rsub_and_rdiv():
    r = np.array([1.25, 3.0])
    jet = 1.0 - jets.seed(r)
    assert np.allclose(jet.v, 1.0 - r) and np.all(jet.d == -1.0)
    inv = 2.0 / jets.seed(r)
    assert np.allclose(inv.v, 2.0 / r)
    assert np.allclose(inv.d, -2.0 / r**2)
    assert np.allclose(inv.h, 4.0 / r**3)
