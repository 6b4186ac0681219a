"""Charge integrands and model-space fields for the two asymptotic models.

The mass functionals pair a perturbation field e (difference of the physical
metric from its reference) with a static weight function.  Everything here is
covariant with respect to the reference metric, which is either the flat
half-space metric or the hyperbolic metric written in the upper-half-ball
chart z = rho * theta (so both references share one Cartesian chart on
{z_n >= 0} and the boundary is {z_n = 0} in both cases).

Flat model statics: 1 and the tangential coordinates x_alpha.
Hyperbolic model statics: cosh(rho) and (sinh(rho)/rho) z_alpha.
Conformal fields pair with the geometric-form functionals: the dilation field
and the tangential essential conformal fields.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gamma as _gamma_fn
from math import pi

import numpy as np

from . import jets
from .geometry import (MetricField, as_points, christoffel_batch,
                       covariant_derivative_sym2, covariant_hessian,
                       ricci_batch)
from .separable import (SeparableField, Term, identity_terms,
                        outer_radial_terms, unit_expo, zero_expo)


def sphere_area(k: int) -> float:
    """Surface measure of the unit k-sphere inside R^{k+1}."""
    n = k + 1
    return 2.0 * pi ** (n / 2.0) / _gamma_fn(n / 2.0)


@dataclass(frozen=True)
class Normalization:
    """Dimension-dependent constants in front of the boundary integrals."""

    dim: int

    @property
    def omega(self) -> float:
        return sphere_area(self.dim - 1)

    @property
    def charge_constant(self) -> float:
        n = self.dim
        return 1.0 / (2.0 * (n - 1) * self.omega)

    @property
    def geometric_constant(self) -> float:
        n = self.dim
        return 1.0 / ((2.0 - n) * (n - 1) * self.omega)


# ---- reference metrics -------------------------------------------------


def flat_reference(n: int) -> MetricField:
    sep = SeparableField(n, 2, identity_terms(n, None))
    return MetricField.from_separable(sep, role="reference-flat", name="flat")


def _sinh_over_rho_sq(r):
    rj = jets.seed(r)
    return (jets.sinh(rj) / rj) ** 2


def _hyp_radial_profile(r):
    rj = jets.seed(r)
    f = (jets.sinh(rj) / rj) ** 2
    return (1.0 - f) / rj ** 2


def hyperbolic_reference(n: int) -> MetricField:
    """Hyperbolic metric b = d rho^2 + sinh(rho)^2 d theta^2 in the z chart.

    Componentwise b_ij = f(rho) delta_ij + (1 - f(rho)) z_i z_j / rho^2 with
    f = (sinh(rho)/rho)^2; radial directions are b-unit.
    """
    terms = identity_terms(n, _sinh_over_rho_sq) + outer_radial_terms(
        n, _hyp_radial_profile)
    sep = SeparableField(n, 2, terms)
    return MetricField.from_separable(sep, role="reference-hyperbolic",
                                      name="hyperbolic")


# ---- static weights ----------------------------------------------------


def flat_weights(n: int) -> list[SeparableField]:
    """Static potentials of the flat half-space: [1, x_1, ..., x_{n-1}]."""
    out = [SeparableField(n, 0, [Term((), 1.0, zero_expo(n), None)])]
    for alpha in range(n - 1):
        out.append(SeparableField(n, 0, [Term((), 1.0, unit_expo(n, alpha), None)]))
    return out


def _cosh_profile(r):
    return jets.cosh(jets.seed(r))


def _sinh_over_rho(r):
    rj = jets.seed(r)
    return jets.sinh(rj) / rj


def hyperbolic_weights(n: int) -> list[SeparableField]:
    """Static potentials of hyperbolic space fixing the boundary: cosh(rho)
    and (sinh(rho)/rho) z_alpha for the tangential axes alpha."""
    out = [SeparableField(n, 0, [Term((), 1.0, zero_expo(n), _cosh_profile)])]
    for alpha in range(n - 1):
        out.append(SeparableField(
            n, 0, [Term((), 1.0, unit_expo(n, alpha), _sinh_over_rho)]))
    return out


# ---- essential conformal fields ---------------------------------------


def flat_conformal_fields(n: int) -> list[SeparableField]:
    """Dilation field x and the tangential fields |x|^2 e_alpha - 2 x_alpha x."""
    dil = [Term((i,), 1.0, unit_expo(n, i), None) for i in range(n)]
    out = [SeparableField(n, 1, dil)]
    for alpha in range(n - 1):
        terms = []
        for i in range(n):
            terms.append(Term((alpha,), 1.0, unit_expo(n, i, i), None))
            terms.append(Term((i,), -2.0, unit_expo(n, alpha, i), None))
        out.append(SeparableField(n, 1, terms))
    return out


def _hyp_dilation_profile(r):
    rj = jets.seed(r)
    return jets.sinh(rj) / rj


def _hyp_mixed_profile(r):
    rj = jets.seed(r)
    return jets.cosh(rj) / rj ** 2 - 1.0 / (rj * jets.sinh(rj))


def _rho_over_sinh(r):
    rj = jets.seed(r)
    return rj / jets.sinh(rj)


def hyperbolic_conformal_fields(n: int) -> list[SeparableField]:
    """Gradients of the hyperbolic statics with respect to the reference."""
    dil = [Term((i,), 1.0, unit_expo(n, i), _hyp_dilation_profile)
           for i in range(n)]
    out = [SeparableField(n, 1, dil)]
    for alpha in range(n - 1):
        terms = [Term((i,), 1.0, unit_expo(n, alpha, i), _hyp_mixed_profile)
                 for i in range(n)]
        terms.append(Term((alpha,), 1.0, zero_expo(n), _rho_over_sinh))
        out.append(SeparableField(n, 1, terms))
    return out


# ---- the charge one-form ----------------------------------------------


def charge_one_form_batch(ref: MetricField, efield, wfield, pts) -> np.ndarray:
    """Covector field w (div e - d tr e) - (grad w) . e + (tr e) dw.

    Divergence, trace, and gradient are all taken with respect to the
    reference metric; e enters through its components and first derivatives.
    Returns (N, n) lower components.
    """
    pts = as_points(pts)
    ginv = ref.inverse(pts)
    nabla = covariant_derivative_sym2(ref, efield, pts)   # (N, k, i, j)
    e = efield.value(pts)
    w = wfield.value(pts)
    dw = wfield.d1(pts)
    div = np.einsum("qkj,qkji->qi", ginv, nabla)
    dtr = np.einsum("qjk,qijk->qi", ginv, nabla)
    tr = np.einsum("qjk,qjk->q", ginv, e)
    grad_w = np.einsum("qkj,qj->qk", ginv, dw)
    contraction = np.einsum("qk,qki->qi", grad_w, e)
    return w[:, None] * (div - dtr) - contraction + tr[:, None] * dw


def corner_integrand_batch(efield, wfield, eta, theta, pts) -> np.ndarray:
    """Scalar w * e(eta, theta) on the corner sphere; eta and theta are
    (N, n) contravariant direction fields."""
    pts = as_points(pts)
    e = efield.value(pts)
    w = wfield.value(pts)
    return w * np.einsum("qij,qi,qj->q", e, eta, theta)


# ---- static identities --------------------------------------------------


def static_potential_residual(ref: MetricField, wfield, pts) -> np.ndarray:
    """Residual of the static-potential equation for a candidate weight:

        Hess w - (Lap w) g - w Ric

    with all operators of the reference metric.  Vanishes identically for the
    flat weights on the flat reference and the hyperbolic weights on the
    hyperbolic reference.  Returns (N, n, n).
    """
    pts = as_points(pts)
    g, ginv, gam, ric, _ = ricci_batch(ref, pts)
    grad = wfield.d1(pts)
    hess = covariant_hessian(gam, grad, wfield.d2(pts))
    lap = np.einsum("qij,qij->q", ginv, hess)
    w = wfield.value(pts)
    return hess - lap[:, None, None] * g - w[:, None, None] * ric


def hessian_conformal_residual(ref: MetricField, wfield, pts) -> np.ndarray:
    """Residual Hess w - w g, zero for the hyperbolic statics."""
    pts = as_points(pts)
    g = ref.metric(pts)
    gam = christoffel_batch(ref, pts)
    grad = wfield.d1(pts)
    hess = covariant_hessian(gam, grad, wfield.d2(pts))
    return hess - wfield.value(pts)[:, None, None] * g
