"""Mass and center functionals over radius ladders, in both forms.

Charge form: pair the difference field e with a static weight through the
reference-covariant charge one-form over hemispheres, minus the weighted
corner contraction over the corner sphere.

Geometric form: pair the (model-shifted) Einstein tensor of the physical
metric with an essential conformal field over hemispheres, plus the Newton
tensor of the boundary paired with the same field over the corner sphere.
For the hyperbolic model the Einstein tensor is shifted by the constant
(n-1)(n-2)/2 times the metric, which kills the reference contribution.

Bulk form (flat model): scalar curvature of the cutoff interpolation
h = delta + chi * e over a half shell plus twice the boundary mean curvature
of h over the matching boundary annulus, with the flat measure.  The cutoff
ramps smoothly from 0 to 1 between half and three quarters of the working
radius, so the inner region is exactly flat.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import jets
from .boundary import (corner_conormal, pair_newton, sigma_geometry)
from .charges import (Normalization, charge_one_form_batch,
                      corner_integrand_batch, flat_conformal_fields,
                      flat_weights, hyperbolic_conformal_fields,
                      hyperbolic_weights)
from .catalog import CatalogEntry
from .errors import ConfigError, DegenerateMassError
from .geometry import MetricField, einstein_batch, ricci_batch
from .quadrature import (LimitEstimate, QuadratureRule, arithmetic_ladder,
                         boundary_annulus_patch, corner_sphere_patch,
                         estimate_limit, half_shell_patch, hemisphere_patch,
                         integrate_values, radius_ladder, split_patch)

CHUNK = 8192

CONVENTIONS = {
    "boundary_normal": "outward",
    "second_form": "gradient-of-outward-normal (spheres positive)",
    "scalar_curvature": "round spheres positive, hyperbolic space -n(n-1)",
    "corner_term": "subtracted in charge form, added in geometric form",
}


def default_radii(entry: CatalogEntry, form: str = "charge") -> list[float]:
    kind, start, step, count = entry.default_ladder
    if entry.model == "hyperbolic" and form == "geometric":
        # curvature cancellation grows exponentially with radius; stay low
        start, step, count = 2.0, 1.0, 5
        kind = "arithmetic"
    start = max(start, entry.rmin * 1.25 + 0.25)
    if kind == "geometric":
        return radius_ladder(start, step, count)
    return arithmetic_ladder(start, step, count)


def _weights_for(entry: CatalogEntry):
    if entry.model == "hyperbolic":
        return hyperbolic_weights(entry.dim)
    return flat_weights(entry.dim)


def _conformal_for(entry: CatalogEntry):
    if entry.model == "hyperbolic":
        return hyperbolic_conformal_fields(entry.dim)
    return flat_conformal_fields(entry.dim)


def _einstein_shift(entry: CatalogEntry) -> float:
    n = entry.dim
    if entry.model == "hyperbolic":
        return (n - 1) * (n - 2) / 2.0
    return 0.0


# ---- charge form ---------------------------------------------------------


def charge_sample(entry: CatalogEntry, r: float, rule: QuadratureRule,
                  index: int = 0) -> float:
    """One charge value at one radius: hemisphere flux minus corner term."""
    n = entry.dim
    ref = entry.reference
    w = _weights_for(entry)[index]
    norm = Normalization(n)

    hemi = hemisphere_patch(n, r, rule)
    total = 0.0
    for sub in split_patch(hemi, CHUNK):
        pts = sub.points
        uform = charge_one_form_batch(ref, entry.efield, w, pts)
        rr = np.linalg.norm(pts, axis=1)
        omega = pts / rr[:, None]
        ginv = ref.inverse(pts)
        raised = np.einsum("qij,qj->qi", ginv, omega)
        mu = raised / np.sqrt(np.einsum("qi,qi->q", omega, raised))[:, None]
        vals = np.einsum("qi,qi->q", uform, mu)
        total += integrate_values(ref, sub, vals)

    corner = corner_sphere_patch(n, r, rule)
    eta = np.zeros_like(corner.points)
    eta[:, -1] = 1.0
    ginv = ref.inverse(corner.points)
    raised = np.einsum("qij,qj->qi", ginv, eta)
    eta_vec = -raised / np.sqrt(
        np.einsum("qi,qi->q", eta, raised))[:, None]
    theta = corner_conormal(ref, corner.points)
    cvals = corner_integrand_batch(entry.efield, w, eta_vec, theta,
                                   corner.points)
    corner_total = integrate_values(ref, corner, cvals)

    return norm.charge_constant * (total - corner_total)


def charge_functional(entry: CatalogEntry, radii=None,
                      rule: QuadratureRule | None = None,
                      index: int = 0) -> LimitEstimate:
    radii = list(radii) if radii is not None else default_radii(entry)
    rule = rule or QuadratureRule.default_for(entry.dim)
    _check_radii(entry, radii)
    samples = [charge_sample(entry, r, rule, index) for r in radii]
    expected = entry.expected_charge_rate if index == 0 else None
    return estimate_limit(radii, samples, expected_rate=expected,
                          noise_floor=_sequence_floor(samples))


def mass_adm(entry: CatalogEntry, radii=None,
             rule: QuadratureRule | None = None) -> LimitEstimate:
    """Charge-form mass: the weight is the model's lapse-like static."""
    return charge_functional(entry, radii, rule, index=0)


def center_adm(entry: CatalogEntry, radii=None,
               rule: QuadratureRule | None = None):
    """Charge-form center: tangential charges divided by the mass."""
    mass = mass_adm(entry, radii, rule)
    _guard_mass(mass.limit)
    comps = []
    for alpha in range(1, entry.dim):
        est = charge_functional(entry, radii, rule, index=alpha)
        comps.append(_scale_estimate(est, 1.0 / mass.limit))
    return CenterResult(mass=mass, components=comps, form="charge")


# ---- geometric form -------------------------------------------------------


def geometric_sample(entry: CatalogEntry, r: float, rule: QuadratureRule,
                     index: int = 0) -> float:
    """One geometric value at one radius: Einstein flux plus Newton corner."""
    n = entry.dim
    g = entry.metric
    xfield = _conformal_for(entry)[index]
    shift = _einstein_shift(entry)
    norm = Normalization(n)

    hemi = hemisphere_patch(n, r, rule)
    total = 0.0
    for sub in split_patch(hemi, CHUNK):
        pts = sub.points
        gval, ginv, ric, scal, ein = einstein_batch(g, pts)
        # the model satisfies Ein(b) = shift*b exactly, so subtracting the
        # numerically evaluated model tensor is exact and cancels the
        # curvature-pipeline roundoff where g approaches b
        bval, _, _, _, bein = einstein_batch(entry.reference, pts)
        ein = (ein - bein) - shift * (gval - bval)
        rr = np.linalg.norm(pts, axis=1)
        omega = pts / rr[:, None]
        raised = np.einsum("qij,qj->qi", ginv, omega)
        mu = raised / np.sqrt(np.einsum("qi,qi->q", omega, raised))[:, None]
        x = xfield.value(pts)
        vals = np.einsum("qij,qi,qj->q", ein, x, mu)
        gram = np.einsum("qia,qij,qjb->qab", sub.jac, gval, sub.jac)
        dens = np.sqrt(np.linalg.det(gram))
        total += float(np.sum(sub.weights * vals * dens))

    corner = corner_sphere_patch(n, r, rule)
    geom = sigma_geometry(g, corner.points)
    theta = corner_conormal(g, corner.points)
    xv = xfield.value(corner.points)
    # model boundaries are totally geodesic: J(b) = 0 exactly, so the same
    # renormalization applies to the Newton corner term
    bgeom = sigma_geometry(entry.reference, corner.points)
    cvals = pair_newton(geom, xv, theta) - pair_newton(bgeom, xv, theta)
    corner_total = integrate_values(g, corner, cvals)

    return norm.geometric_constant * (total + corner_total)


def geometric_functional(entry: CatalogEntry, radii=None,
                         rule: QuadratureRule | None = None,
                         index: int = 0) -> LimitEstimate:
    radii = list(radii) if radii is not None else default_radii(entry, "geometric")
    rule = rule or QuadratureRule.default_for(entry.dim)
    _check_radii(entry, radii)
    samples = [geometric_sample(entry, r, rule, index) for r in radii]
    return estimate_limit(radii, samples,
                          noise_floor=_sequence_floor(samples))


def mass_geometric(entry: CatalogEntry, radii=None,
                   rule: QuadratureRule | None = None) -> LimitEstimate:
    return geometric_functional(entry, radii, rule, index=0)


def center_geometric(entry: CatalogEntry, radii=None,
                     rule: QuadratureRule | None = None):
    """Geometric center: tangential conformal charges over -2 mass."""
    mass = mass_geometric(entry, radii, rule)
    _guard_mass(mass.limit)
    comps = []
    for alpha in range(1, entry.dim):
        est = geometric_functional(entry, radii, rule, index=alpha)
        comps.append(_scale_estimate(est, -0.5 / mass.limit))
    return CenterResult(mass=mass, components=comps, form="geometric")


# ---- bulk form (flat model) ------------------------------------------------


class _CutoffField:
    """chi(|x|) * e with exact derivatives; chi ramps 0 -> 1 on [r/2, 3r/4]."""

    def __init__(self, efield, r_outer: float):
        self.e = efield
        self.r = r_outer

    def _chi(self, rho: np.ndarray):
        r = self.r
        t = (jets.seed(rho) - r / 2.0) * (4.0 / r)
        s = t ** 4 * (35.0 - 84.0 * t + 70.0 * t ** 2 - 20.0 * t ** 3)
        one = jets.const(1.0, rho)
        zero = jets.const(0.0, rho)
        s = jets.where(rho >= 0.75 * r, one, s)
        return jets.where(rho <= 0.5 * r, zero, s)

    def value(self, pts):
        rho = np.linalg.norm(pts, axis=1)
        chi = self._chi(rho)
        return chi.v[:, None, None] * self.e.value(pts)

    def d1(self, pts):
        rho = np.linalg.norm(pts, axis=1)
        theta = pts / rho[:, None]
        chi = self._chi(rho)
        ev = self.e.value(pts)
        ed1 = self.e.d1(pts)
        grad_chi = chi.d[:, None] * theta
        return (grad_chi[:, :, None, None] * ev[:, None, :, :]
                + chi.v[:, None, None, None] * ed1)

    def d2(self, pts):
        n = pts.shape[1]
        rho = np.linalg.norm(pts, axis=1)
        theta = pts / rho[:, None]
        chi = self._chi(rho)
        ev = self.e.value(pts)
        ed1 = self.e.d1(pts)
        ed2 = self.e.d2(pts)
        eye = np.eye(n)
        hess_chi = (chi.h[:, None, None] * theta[:, :, None] * theta[:, None, :]
                    + (chi.d / rho)[:, None, None]
                    * (eye[None, :, :] - theta[:, :, None] * theta[:, None, :]))
        grad_chi = chi.d[:, None] * theta
        out = hess_chi[:, :, :, None, None] * ev[:, None, None, :, :]
        out = out + grad_chi[:, :, None, None, None] * ed1[:, None, :, :, :]
        out = out + grad_chi[:, None, :, None, None] * ed1[:, :, None, :, :]
        out = out + chi.v[:, None, None, None, None] * ed2
        return out


def _cutoff_metric(entry: CatalogEntry, r_outer: float) -> MetricField:
    n = entry.dim
    cut = _CutoffField(entry.efield, r_outer)
    eye = np.eye(n)

    def func(pts):
        return eye[None, :, :] + cut.value(pts)

    return MetricField(dim=n, func=func, d1func=cut.d1, d2func=cut.d2,
                       name=entry.name + "+cutoff", domain_rmin=entry.rmin)


def bulk_sample(entry: CatalogEntry, r: float, rule: QuadratureRule) -> float:
    """One bulk value: cutoff scalar curvature over the half shell plus twice
    the cutoff boundary mean curvature, both with the flat measure."""
    n = entry.dim
    h = _cutoff_metric(entry, r)
    ref = entry.reference
    norm = Normalization(n)

    total_r = 0.0
    total_h = 0.0
    for a, b in ((r / 2.0, 0.75 * r), (0.75 * r, r)):
        shell = half_shell_patch(n, a, b, rule)
        for sub in split_patch(shell, CHUNK):
            scal = ricci_batch(h, sub.points)[4]
            total_r += integrate_values(ref, sub, scal)
        ann = boundary_annulus_patch(n, a, b, rule)
        for sub in split_patch(ann, CHUNK):
            hval = sigma_geometry(h, sub.points).mean_curvature
            total_h += integrate_values(ref, sub, hval)

    return norm.charge_constant * (total_r + 2.0 * total_h)


def mass_bulk(entry: CatalogEntry, radii=None,
              rule: QuadratureRule | None = None) -> LimitEstimate:
    if entry.model != "flat":
        raise ConfigError("the bulk form is defined for the flat model only")
    radii = list(radii) if radii is not None else default_radii(entry)
    rule = rule or QuadratureRule.default_for(entry.dim)
    for r in radii:
        if r / 4.0 < entry.rmin:
            raise ConfigError(
                f"bulk radius {r} reaches inside the chart domain "
                f"(needs r/4 >= {entry.rmin})")
    samples = [bulk_sample(entry, r, rule) for r in radii]
    return estimate_limit(radii, samples,
                          noise_floor=_sequence_floor(samples))


# ---- shared small pieces ---------------------------------------------------


def _sequence_floor(samples) -> float:
    # Roundoff scale for O(1) functionals.  Sequences entirely below it are
    # zero at working precision (parity-zero charges, flat-model residuals)
    # and carry no rate information worth flagging.
    return 1e-11 * max(1.0, float(np.max(np.abs(samples))))


@dataclass
class CenterResult:
    mass: LimitEstimate
    components: list
    form: str

    @property
    def values(self) -> list[float]:
        return [c.limit for c in self.components]


def _scale_estimate(est: LimitEstimate, s: float) -> LimitEstimate:
    return LimitEstimate(
        radii=list(est.radii), samples=[v * s for v in est.samples],
        limit=est.limit * s, error=abs(est.error * s), rate=est.rate,
        ladder=est.ladder, flags=list(est.flags),
        extrapolants=[v * s for v in est.extrapolants])


def _guard_mass(mass: float) -> None:
    if abs(mass) < 1e-8:
        raise DegenerateMassError(
            f"center undefined: mass {mass:.3e} is numerically zero")


def _check_radii(entry: CatalogEntry, radii) -> None:
    if not radii:
        raise ConfigError("radius ladder is empty")
    if any(r <= entry.rmin for r in radii):
        raise ConfigError(
            f"radii must stay outside the chart inner radius {entry.rmin:.3g}; "
            f"got {min(radii):.3g}")
    if any(radii[k] >= radii[k + 1] for k in range(len(radii) - 1)):
        raise ConfigError("radius ladder must be strictly increasing")
