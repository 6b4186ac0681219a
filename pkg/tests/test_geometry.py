"""Curvature and derivative operators against an independent sympy oracle."""

import numpy as np
import pytest
import sympy as sp

from halfmass import geometry
from halfmass.errors import SingularMetricError
from halfmass.geometry import (MetricField, christoffel_batch,
                               covariant_derivative_sym2, div_sym2_batch,
                               einstein_batch, fd_derivative,
                               killing_deformation_batch, ricci_batch,
                               riemann_batch, rotated_chart)

from symbolic import SymbolicGeometry, polynomial_perturbation_metric


@pytest.fixture(scope="module")
def oracle():
    gexprs, syms = polynomial_perturbation_metric(3)
    return SymbolicGeometry(gexprs, syms)


@pytest.fixture(scope="module")
def metric(oracle):
    return MetricField(dim=3, func=oracle.g, d1func=oracle.d1,
                       d2func=oracle.d2, name="sym-oracle")


@pytest.fixture(scope="module")
def pts():
    rng = np.random.default_rng(21)
    p = rng.uniform(-1.5, 1.5, size=(30, 3))
    p[:, 2] = np.abs(p[:, 2]) + 0.1
    return p


def test_christoffel_matches_symbolic(oracle, metric, pts):
    got = christoffel_batch(metric, pts)
    assert np.allclose(got, oracle.gamma(pts), atol=1e-11)


def test_ricci_and_scalar_match_symbolic(oracle, metric, pts):
    _, _, _, ric, scal = ricci_batch(metric, pts)
    assert np.allclose(ric, oracle.ricci(pts), atol=1e-10)
    assert np.allclose(scal, oracle.scalar(pts), atol=1e-10)


def test_einstein_matches_symbolic(oracle, metric, pts):
    ein = einstein_batch(metric, pts)[4]
    assert np.allclose(ein, oracle.einstein(pts), atol=1e-10)


def test_riemann_first_bianchi_and_ricci_contraction(oracle, metric, pts):
    riem = riemann_batch(metric, pts)
    g = metric.metric(pts)
    low = np.einsum("qim,qmjkl->qijkl", g, riem)
    # antisymmetry in the last pair and the cyclic identity
    assert np.allclose(low, -np.einsum("qijlk->qijkl", low), atol=1e-11)
    cyc = (low + np.einsum("qiklj->qijkl", low)
           + np.einsum("qiljk->qijkl", low))
    assert np.allclose(cyc, 0.0, atol=1e-10)
    ric = np.einsum("qkjkl->qjl", riem)
    assert np.allclose(ric, oracle.ricci(pts), atol=1e-10)


def test_covariant_derivative_sym2_matches_symbolic(oracle, metric, pts):
    syms = oracle.syms
    kexprs = sp.Matrix([
        [syms[0]**2, syms[0] * syms[1], sp.S.One],
        [syms[0] * syms[1], syms[2], syms[1] * syms[2]],
        [sp.S.One, syms[1] * syms[2], syms[0] + 2],
    ])
    sym_nab = oracle.covariant_derivative_sym2(kexprs)

    k_fun = [[sp.lambdify(syms, kexprs[i, j], "numpy") for j in range(3)]
             for i in range(3)]
    kd1 = [[[sp.lambdify(syms, sp.diff(kexprs[i, j], syms[c]), "numpy")
             for j in range(3)] for i in range(3)] for c in range(3)]

    class KField:
        def value(self, p):
            args = [p[:, i] for i in range(3)]
            out = np.empty((p.shape[0], 3, 3))
            for i in range(3):
                for j in range(3):
                    out[:, i, j] = np.broadcast_to(k_fun[i][j](*args),
                                                   (p.shape[0],))
            return out

        def d1(self, p):
            args = [p[:, i] for i in range(3)]
            out = np.empty((p.shape[0], 3, 3, 3))
            for c in range(3):
                for i in range(3):
                    for j in range(3):
                        out[:, c, i, j] = np.broadcast_to(
                            kd1[c][i][j](*args), (p.shape[0],))
            return out

    got = covariant_derivative_sym2(metric, KField(), pts)
    assert np.allclose(got, sym_nab(pts), atol=1e-10)

    want_div = np.einsum("qkj,qkij->qi",
                         metric.inverse(pts), sym_nab(pts))
    assert np.allclose(div_sym2_batch(metric, KField(), pts), want_div,
                       atol=1e-10)


def test_killing_deformation_matches_symbolic(oracle, metric, pts):
    syms = oracle.syms
    yexprs = [syms[1] * syms[2], syms[0]**2 - syms[2], syms[0] * syms[1] + 1]
    sym_def = oracle.killing_deformation(yexprs)

    y_fun = [sp.lambdify(syms, e, "numpy") for e in yexprs]
    yd1 = [[sp.lambdify(syms, sp.diff(e, s), "numpy") for s in syms]
           for e in yexprs]

    class YField:
        def value(self, p):
            args = [p[:, i] for i in range(3)]
            return np.stack([np.broadcast_to(f(*args), (p.shape[0],))
                             for f in y_fun], axis=1)

        def d1(self, p):
            args = [p[:, i] for i in range(3)]
            out = np.empty((p.shape[0], 3, 3))
            for k in range(3):
                for i in range(3):
                    out[:, k, i] = np.broadcast_to(yd1[i][k](*args),
                                                   (p.shape[0],))
            return out

    got = killing_deformation_batch(metric, YField(), pts)
    assert np.allclose(got.full, sym_def(pts), atol=1e-10)
    ginv = metric.inverse(pts)
    tr = np.einsum("qij,qij->q", ginv, got.full)
    assert np.allclose(got.trace_free,
                       got.full - (tr / 3)[:, None, None] * metric.metric(pts),
                       atol=1e-12)
    assert np.allclose(got.div, tr, atol=1e-10)


@pytest.mark.parametrize("backend", ["fd2", "fd4"])
def test_fd_backends_approximate_analytic_curvature(oracle, metric, pts,
                                                    backend):
    # the oracle metric is quadratic, so both stencils are exact up to
    # roundoff; the order contrast is measured in the scaling test below
    fd = metric.with_backend(backend)
    ric_a = ricci_batch(metric, pts)[3]
    ric_f = ricci_batch(fd, pts)[3]
    assert np.max(np.abs(ric_f - ric_a)) < 1e-6


def test_fd_derivative_order_scaling():
    def f(p):
        return np.sin(p[:, :1] * p[:, 1:2]) + p[:, 2:] ** 3

    pts = np.array([[0.7, -0.4, 1.2], [1.1, 0.5, 0.6]])

    def exact(p):
        out = np.zeros((p.shape[0], 3, 1))
        out[:, 0, 0] = np.cos(p[:, 0] * p[:, 1]) * p[:, 1]
        out[:, 1, 0] = np.cos(p[:, 0] * p[:, 1]) * p[:, 0]
        out[:, 2, 0] = 3 * p[:, 2] ** 2
        return out

    errs = {}
    for order, hs in (("fd2", (1e-3, 5e-4)), ("fd4", (2e-2, 1e-2))):
        e = [np.max(np.abs(fd_derivative(f, pts, order, eps=h) - exact(pts)))
             for h in hs]
        errs[order] = np.log(e[0] / e[1]) / np.log(2.0)
    assert abs(errs["fd2"] - 2.0) < 0.3
    assert abs(errs["fd4"] - 4.0) < 0.4


def test_rotated_chart_preserves_scalar_curvature(oracle, metric, pts):
    th = 0.6
    q = np.array([[np.cos(th), -np.sin(th), 0.0],
                  [np.sin(th), np.cos(th), 0.0],
                  [0.0, 0.0, 1.0]])
    rot = rotated_chart(metric, q)
    scal_rot = ricci_batch(rot, pts)[4]
    scal_at_pushed = ricci_batch(metric, pts @ q.T)[4]
    assert np.allclose(scal_rot, scal_at_pushed, atol=1e-10)


def test_check_spd_raises_on_degenerate_metric():
    bad = MetricField.from_callable(
        3, lambda p: np.zeros((p.shape[0], 3, 3)), backend="fd2")
    with pytest.raises(SingularMetricError):
        bad.check_spd(np.array([[0.0, 0.0, 1.0]]))


def test_analytic_backend_requires_derivative_callables():
    with pytest.raises(ValueError):
        MetricField(dim=3, func=lambda p: None, backend="analytic")
