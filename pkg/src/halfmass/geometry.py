"""Batched tensor calculus for Riemannian metrics on half-space charts.

All evaluators are vectorized: points are (N, n) arrays, metrics return
(N, n, n), first derivatives (N, k, i, j) with the derivative axis leading,
second derivatives (N, k, l, i, j).  Index conventions:

    Gamma[q, k, i, j]        Christoffel symbol Gamma^k_{ij}
    R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj} + Gamma^i_{km} Gamma^m_{lj}
                - Gamma^i_{lm} Gamma^m_{kj}
    Ric_{jl} = R^k_{jkl}     (round spheres come out positive)

The analytic backend uses exact derivative callables; fd2/fd4 use central
differences with per-axis steps h_i = eps * max(1, |x_i|).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import SingularMetricError

EPS_FIRST = 1e-5
EPS_SECOND = 1e-4

_FD1_STENCILS = {
    "fd2": ((-1, -0.5), (1, 0.5)),
    "fd4": ((-2, 1.0 / 12.0), (-1, -8.0 / 12.0), (1, 8.0 / 12.0), (2, -1.0 / 12.0)),
}
_FD2_DIAG_STENCILS = {
    "fd2": ((-1, 1.0), (0, -2.0), (1, 1.0)),
    "fd4": ((-2, -1.0 / 12.0), (-1, 16.0 / 12.0), (0, -30.0 / 12.0),
            (1, 16.0 / 12.0), (2, -1.0 / 12.0)),
}


def as_points(pts) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    return pts


def _steps(pts: np.ndarray, eps: float) -> np.ndarray:
    return eps * np.maximum(1.0, np.abs(pts))


def _expand(h: np.ndarray, like: np.ndarray) -> np.ndarray:
    return h.reshape(h.shape + (1,) * (like.ndim - 1))


def fd_derivative(func: Callable, pts: np.ndarray, order: str = "fd4",
                  eps: float = EPS_FIRST) -> np.ndarray:
    """First derivatives of an arbitrary batched field, derivative axis leading."""
    pts = as_points(pts)
    n = pts.shape[1]
    h = _steps(pts, eps)
    cols = []
    for k in range(n):
        acc = None
        for off, w in _FD1_STENCILS[order]:
            shifted = pts.copy()
            shifted[:, k] += off * h[:, k]
            val = w * func(shifted)
            acc = val if acc is None else acc + val
        cols.append(acc / _expand(h[:, k], acc))
    return np.stack(cols, axis=1)


def fd_second_derivative(func: Callable, pts: np.ndarray, order: str = "fd4",
                         eps: float = EPS_SECOND) -> np.ndarray:
    """Second derivatives of a batched field, axes (k, l) leading."""
    pts = as_points(pts)
    n = pts.shape[1]
    h = _steps(pts, eps)
    f0 = func(pts)
    out = np.zeros((pts.shape[0], n, n) + f0.shape[1:])
    stencil1 = _FD1_STENCILS[order]
    for k in range(n):
        acc = None
        for off, w in _FD2_DIAG_STENCILS[order]:
            if off == 0:
                val = w * f0
            else:
                shifted = pts.copy()
                shifted[:, k] += off * h[:, k]
                val = w * func(shifted)
            acc = val if acc is None else acc + val
        out[:, k, k] = acc / _expand(h[:, k] ** 2, acc)
    for k in range(n):
        for l in range(k + 1, n):
            acc = None
            for off_k, w_k in stencil1:
                for off_l, w_l in stencil1:
                    shifted = pts.copy()
                    shifted[:, k] += off_k * h[:, k]
                    shifted[:, l] += off_l * h[:, l]
                    val = (w_k * w_l) * func(shifted)
                    acc = val if acc is None else acc + val
            mixed = acc / _expand(h[:, k] * h[:, l], acc)
            out[:, k, l] = mixed
            out[:, l, k] = mixed
    return out


@dataclass
class MetricField:
    """A Riemannian metric given by batched component evaluators.

    Parameters
    ----------
    dim : int
        Chart dimension n; points live in the half-space x_n >= 0.
    func : callable
        (N, n) -> (N, n, n) symmetric positive-definite components.
    d1func, d2func : callable, optional
        Exact derivative evaluators; required by the analytic backend.
    role : str
        "physical", "reference-flat", or "reference-hyperbolic".
    backend : str
        "analytic", "fd2", or "fd4"; fd backends always difference `func`.
    domain_rmin : float
        Inner chart radius; callers should stay at |x| >= domain_rmin.
    """

    dim: int
    func: Callable
    d1func: Callable | None = None
    d2func: Callable | None = None
    role: str = "physical"
    backend: str = "analytic"
    name: str = ""
    domain_rmin: float = 0.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.backend == "analytic" and (self.d1func is None or self.d2func is None):
            raise ValueError("analytic backend requires exact derivative callables")
        if self.backend not in ("analytic", "fd2", "fd4"):
            raise ValueError(f"unknown backend {self.backend!r}")

    @classmethod
    def from_separable(cls, sep, **kw) -> "MetricField":
        return cls(dim=sep.dim, func=sep.value, d1func=sep.d1, d2func=sep.d2, **kw)

    @classmethod
    def from_callable(cls, dim: int, func: Callable, backend: str = "fd4",
                      **kw) -> "MetricField":
        return cls(dim=dim, func=func, backend=backend, **kw)

    def with_backend(self, backend: str) -> "MetricField":
        return replace(self, backend=backend)

    # ---- evaluation ---------------------------------------------------

    def metric(self, pts) -> np.ndarray:
        return self.func(as_points(pts))

    def inverse(self, pts) -> np.ndarray:
        g = self.metric(pts)
        try:
            return np.linalg.inv(g)
        except np.linalg.LinAlgError as exc:
            raise SingularMetricError(str(exc)) from exc

    def first_derivatives(self, pts) -> np.ndarray:
        if self.backend == "analytic":
            return self.d1func(as_points(pts))
        return fd_derivative(self.func, pts, self.backend, EPS_FIRST)

    def second_derivatives(self, pts) -> np.ndarray:
        if self.backend == "analytic":
            return self.d2func(as_points(pts))
        return fd_second_derivative(self.func, pts, self.backend, EPS_SECOND)

    def check_spd(self, pts) -> None:
        g = self.metric(pts)
        evals = np.linalg.eigvalsh(g)
        if np.any(evals <= 0):
            bad = np.where(np.any(evals <= 0, axis=1))[0][0]
            raise SingularMetricError(
                f"metric not positive definite at sample {bad}: eigenvalues {evals[bad]}"
            )


@dataclass
class TensorValue:
    """Tensor components at a point with their variance signature."""

    point: np.ndarray
    variance: tuple[str, ...]   # "u" contravariant, "d" covariant, per slot
    components: np.ndarray


@dataclass
class CurvatureValue:
    point: np.ndarray
    riemann: np.ndarray          # R^i_{jkl}
    ricci: np.ndarray
    scalar: float


@dataclass
class KillingDeformation:
    full: np.ndarray             # (1/2) Lie_Y g, covariant
    trace_free: np.ndarray
    div: np.ndarray


# ---- batched core -----------------------------------------------------


def christoffel_batch(metric: MetricField, pts) -> np.ndarray:
    pts = as_points(pts)
    ginv = metric.inverse(pts)
    d1 = metric.first_derivatives(pts)
    # A[q, m, i, j] = d_i g_mj + d_j g_mi - d_m g_ij
    a = (np.einsum("qimj->qmij", d1) + np.einsum("qjmi->qmij", d1)
         - np.einsum("qmij->qmij", d1))
    return 0.5 * np.einsum("qkm,qmij->qkij", ginv, a)


def _christoffel_with_derivative(metric: MetricField, pts):
    pts = as_points(pts)
    g = metric.metric(pts)
    ginv = np.linalg.inv(g)
    d1 = metric.first_derivatives(pts)
    d2 = metric.second_derivatives(pts)
    a = (np.einsum("qimj->qmij", d1) + np.einsum("qjmi->qmij", d1)
         - np.einsum("qmij->qmij", d1))
    gamma = 0.5 * np.einsum("qkm,qmij->qkij", ginv, a)
    dginv = -np.einsum("qka,qlab,qbm->qlkm", ginv, d1, ginv)
    da = (np.einsum("qlimj->qlmij", d2) + np.einsum("qljmi->qlmij", d2)
          - np.einsum("qlmij->qlmij", d2))
    dgamma = 0.5 * (np.einsum("qlkm,qmij->qlkij", dginv, a)
                    + np.einsum("qkm,qlmij->qlkij", ginv, da))
    return g, ginv, gamma, dgamma


def ricci_batch(metric: MetricField, pts):
    """Returns (g, ginv, gamma, ricci, scalar) at the given points."""
    g, ginv, gamma, dgamma = _christoffel_with_derivative(metric, pts)
    # Ric_jl = d_a Gamma^a_{lj} - d_l Gamma^a_{aj} + Gamma^a_{am} Gamma^m_{lj}
    #          - Gamma^a_{lm} Gamma^m_{aj}
    t1 = np.einsum("qaalj->qjl", dgamma)
    t2 = np.einsum("qlaaj->qjl", dgamma)
    contr = np.einsum("qaam->qm", gamma)
    t3 = np.einsum("qm,qmlj->qjl", contr, gamma)
    t4 = np.einsum("qalm,qmaj->qjl", gamma, gamma)
    ric = t1 - t2 + t3 - t4
    scal = np.einsum("qjl,qjl->q", ginv, ric)
    return g, ginv, gamma, ric, scal


def riemann_batch(metric: MetricField, pts) -> np.ndarray:
    _, _, gamma, dgamma = _christoffel_with_derivative(metric, pts)
    rm = (np.einsum("qkilj->qijkl", dgamma) - np.einsum("qlikj->qijkl", dgamma)
          + np.einsum("qikm,qmlj->qijkl", gamma, gamma)
          - np.einsum("qilm,qmkj->qijkl", gamma, gamma))
    return rm


def einstein_batch(metric: MetricField, pts):
    """Returns (g, ginv, ricci, scalar, einstein) at the given points."""
    g, ginv, _, ric, scal = ricci_batch(metric, pts)
    ein = ric - 0.5 * scal[:, None, None] * g
    return g, ginv, ric, scal, ein


# ---- batched covariant operations on fields ---------------------------


def covariant_derivative_sym2(metric: MetricField, kfield, pts) -> np.ndarray:
    """nabla_k K_ij for a symmetric bilinear field with a .d1 evaluator."""
    pts = as_points(pts)
    gamma = christoffel_batch(metric, pts)
    kval = kfield.value(pts)
    dk = kfield.d1(pts)
    corr1 = np.einsum("qmki,qmj->qkij", gamma, kval)
    corr2 = np.einsum("qmkj,qim->qkij", gamma, kval)
    return dk - corr1 - corr2


def div_sym2_batch(metric: MetricField, kfield, pts) -> np.ndarray:
    """(div K)_i = g^{kj} nabla_k K_{ji}."""
    nabla = covariant_derivative_sym2(metric, kfield, pts)
    ginv = metric.inverse(pts)
    return np.einsum("qkj,qkji->qi", ginv, nabla)


def killing_deformation_batch(metric: MetricField, yfield, pts) -> KillingDeformation:
    """Symmetrized covariant derivative of a vector field, with trace data."""
    pts = as_points(pts)
    g = metric.metric(pts)
    ginv = np.linalg.inv(g)
    gamma = christoffel_batch(metric, pts)
    y = yfield.value(pts)
    dy = yfield.d1(pts)
    nabla_y = dy + np.einsum("qikm,qm->qki", gamma, y)   # nabla_k Y^i
    lowered = np.einsum("qim,qkm->qki", g, nabla_y)      # nabla_k Y_i
    full = 0.5 * (lowered + np.einsum("qki->qik", lowered))
    div = np.einsum("qkk->q", nabla_y)
    p = metric.dim
    tf = full - (div / p)[:, None, None] * g
    return KillingDeformation(full=full, trace_free=tf, div=div)


def covariant_hessian(gamma: np.ndarray, grad: np.ndarray, hess: np.ndarray) -> np.ndarray:
    """Hessian of a scalar from its partials: d2 w - Gamma^k_{ij} d_k w."""
    return hess - np.einsum("qkij,qk->qij", gamma, grad)


# ---- single-point wrappers (spec-level operations) ---------------------


def christoffel(metric: MetricField, p) -> TensorValue:
    p = np.asarray(p, dtype=float)
    comp = christoffel_batch(metric, p)[0]
    return TensorValue(point=p, variance=("u", "d", "d"), components=comp)


def curvature(metric: MetricField, p) -> CurvatureValue:
    p = np.asarray(p, dtype=float)
    rm = riemann_batch(metric, p)[0]
    _, _, _, ric, scal = ricci_batch(metric, p)
    return CurvatureValue(point=p, riemann=rm, ricci=ric[0], scalar=float(scal[0]))


def einstein_tensor(metric: MetricField, p) -> TensorValue:
    p = np.asarray(p, dtype=float)
    _, _, _, _, ein = einstein_batch(metric, p)
    return TensorValue(point=p, variance=("d", "d"), components=ein[0])


def div_sym2(metric: MetricField, kfield, p) -> TensorValue:
    p = np.asarray(p, dtype=float)
    comp = div_sym2_batch(metric, kfield, p)[0]
    return TensorValue(point=p, variance=("d",), components=comp)


def killing_deformation(metric: MetricField, yfield, p) -> KillingDeformation:
    out = killing_deformation_batch(metric, yfield, p)
    return KillingDeformation(full=out.full[0], trace_free=out.trace_free[0],
                              div=out.div[0])


# ---- generic field adapters --------------------------------------------


@dataclass
class CallableField:
    """Wrap a batched callable as a field, differentiating by finite differences."""

    dim: int
    fn: Callable
    order: str = "fd4"
    eps: float = 1e-6

    def value(self, pts):
        return self.fn(as_points(pts))

    def d1(self, pts):
        return fd_derivative(self.fn, pts, self.order, self.eps)


@dataclass
class RotatedMetricField:
    """Pullback of a metric under the linear chart map x -> Q x."""

    base: MetricField
    q: np.ndarray

    def _push(self, pts):
        return as_points(pts) @ self.q.T

    def metric_field(self) -> MetricField:
        qm = np.asarray(self.q, dtype=float)

        def func(pts):
            g = self.base.metric(self._push(pts))
            return np.einsum("ai,bj,qab->qij", qm, qm, g)

        def d1func(pts):
            d1 = self.base.first_derivatives(self._push(pts))
            return np.einsum("ck,ai,bj,qcab->qkij", qm, qm, qm, d1)

        def d2func(pts):
            d2 = self.base.second_derivatives(self._push(pts))
            return np.einsum("ck,dl,ai,bj,qcdab->qklij", qm, qm, qm, qm, d2)

        if self.base.backend != "analytic":
            return MetricField.from_callable(
                self.base.dim, func, backend=self.base.backend,
                role=self.base.role, name=self.base.name + "+rotated",
                domain_rmin=self.base.domain_rmin, params=dict(self.base.params),
            )
        return MetricField(
            dim=self.base.dim, func=func, d1func=d1func, d2func=d2func,
            role=self.base.role, name=self.base.name + "+rotated",
            domain_rmin=self.base.domain_rmin, params=dict(self.base.params),
        )


def rotated_chart(metric: MetricField, q: np.ndarray) -> MetricField:
    """Precompose a metric with a boundary-preserving rotation of the chart."""
    q = np.asarray(q, dtype=float)
    n = metric.dim
    if q.shape != (n, n) or not np.allclose(q @ q.T, np.eye(n), atol=1e-12):
        raise ValueError("chart rotation must be orthogonal")
    if not np.allclose(q[-1], np.eye(n)[-1], atol=1e-12):
        raise ValueError("chart rotation must fix the boundary normal direction")
    return RotatedMetricField(metric, q).metric_field()
