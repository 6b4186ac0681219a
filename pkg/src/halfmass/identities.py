"""Pointwise identity checks, sign-convention selection, and decay reports.

Three families of checks live here:

* an exact divergence identity for symmetric bilinear forms paired with
  vector fields, evaluated against seeded polynomial test fields;
* the contracted boundary identity relating the intrinsic divergence of
  the Newton tensor to the ambient Ricci flux, together with an empirical
  selector that confirms the sign pairing;
* static-potential residuals and decay-rate fits that admit or reject a
  metric for the asymptotic model it declares.

Residuals are absolute and travel with a scale (the largest participating
term), so a small residual is meaningful even near cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .boundary import sigma_geometry, sigma_mean_curvature, sigma_outward_normal
from .charges import static_potential_residual
from .errors import ConfigError
from .geometry import (
    _FD1_STENCILS,
    MetricField,
    _christoffel_with_derivative,
    as_points,
    christoffel_batch,
    covariant_derivative_sym2,
    covariant_hessian,
    fd_derivative,
    killing_deformation_batch,
    ricci_batch,
)
from .catalog import CatalogEntry
from .invariants import default_radii

# Empirical resolution of the boundary identity: with the outward normal and
# the positive-spheres second form, div_Sigma(Newton) equals +Ricci(eta, .)
# in the boundary-tangent directions.  identity_suite re-measures this.
CODAZZI_CONVENTION = ("divergence of the Newton tensor equals +Ricci(eta, .) "
                      "along boundary-tangent directions, outward normal")

STATIC_OPERATOR = ("adjoint form: Hess w - (Lap w) g - w Ric; hyperbolic "
                   "potentials satisfy Hess W = W b, so Lap W = n W")


# ---- reporting type -------------------------------------------------------


@dataclass
class ResidualReport:
    """Aggregate of one identity checked at a batch of points."""

    identity: str
    points: np.ndarray
    residuals: np.ndarray
    scale: float
    tolerance: float
    seed: int | None = None
    notes: dict = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0

    @property
    def rms_residual(self) -> float:
        if not self.residuals.size:
            return 0.0
        return float(np.sqrt(np.mean(self.residuals ** 2)))

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tolerance


# ---- seeded polynomial test fields ----------------------------------------


def _monomial_exponents(dim: int, degree: int) -> np.ndarray:
    out = []

    def rec(prefix, budget):
        if len(prefix) == dim:
            out.append(tuple(prefix))
            return
        for p in range(budget + 1):
            rec(prefix + [p], budget - p)

    rec([], degree)
    return np.array(sorted(out), dtype=int)


@dataclass
class PolynomialField:
    """Tensor-valued polynomial with exact derivatives.

    coeffs has shape (M,) + component shape, one slice per monomial row of
    `exponents`.
    """

    dim: int
    exponents: np.ndarray
    coeffs: np.ndarray

    def value(self, pts):
        pts = as_points(pts)
        mono = np.prod(pts[:, None, :] ** self.exponents[None, :, :], axis=2)
        return np.einsum("qm,m...->q...", mono, self.coeffs)

    def d1(self, pts):
        pts = as_points(pts)
        q, n = pts.shape
        m = self.exponents.shape[0]
        dmono = np.empty((q, n, m))
        for k in range(n):
            ek = self.exponents[:, k]
            lowered = self.exponents.copy()
            lowered[:, k] = np.maximum(ek - 1, 0)
            dmono[:, k, :] = ek[None, :] * np.prod(
                pts[:, None, :] ** lowered[None, :, :], axis=2)
        return np.einsum("qkm,m...->qk...", dmono, self.coeffs)


def random_polynomial_fields(dim: int, seed: int,
                             degree: int = 3) -> tuple[PolynomialField, PolynomialField]:
    """Seeded bilinear-form and vector polynomials, coefficients in [-1, 1]."""
    rng = np.random.default_rng(seed)
    expo = _monomial_exponents(dim, degree)
    m = expo.shape[0]
    kc = rng.uniform(-1.0, 1.0, size=(m, dim, dim))
    kc = 0.5 * (kc + np.swapaxes(kc, 1, 2))
    yc = rng.uniform(-1.0, 1.0, size=(m, dim))
    return PolynomialField(dim, expo, kc), PolynomialField(dim, expo, yc)


@dataclass
class MetricAsBilinear:
    """Adapter exposing a metric's components as a plain bilinear field."""

    metric: MetricField

    def value(self, pts):
        return self.metric.metric(pts)

    def d1(self, pts):
        return self.metric.first_derivatives(pts)


# ---- divergence identity ---------------------------------------------------


def pohozaev_residual(metric: MetricField, kfield, yfield, pts,
                      fd_step: float | None = None,
                      fd_order: str = "fd4"):
    """Pointwise defect of div(Y .| K) against its three-term expansion.

    The expansion is <div K, Y> + <K, trace-free deformation of Y> +
    (div Y)(tr K)/n.  With `fd_step` set, the left side differentiates the
    assembled one-form K(Y, .) by central differences of that step, so the
    residual exposes the finite-difference truncation order.

    Returns (residuals, scales), both (N,).
    """
    pts = as_points(pts)
    n = metric.dim
    g = metric.metric(pts)
    ginv = np.linalg.inv(g)
    gamma = christoffel_batch(metric, pts)

    kval = kfield.value(pts)
    kd1 = kfield.d1(pts)
    yval = yfield.value(pts)

    nabla_k = (kd1 - np.einsum("qmki,qmj->qkij", gamma, kval)
               - np.einsum("qmkj,qim->qkij", gamma, kval))
    div_k = np.einsum("qki,qkij->qj", ginv, nabla_k)
    t_div = np.einsum("qj,qj->q", div_k, yval)

    deform = killing_deformation_batch(metric, yfield, pts)
    k_up = np.einsum("qia,qjb,qab->qij", ginv, ginv, kval)
    t_tf = np.einsum("qij,qij->q", k_up, deform.trace_free)
    tr_k = np.einsum("qij,qij->q", ginv, kval)
    t_tr = deform.div * tr_k / n

    omega = np.einsum("qcb,qc->qb", kval, yval)
    if fd_step is None:
        domega = (np.einsum("qacb,qc->qab", kd1, yval)
                  + np.einsum("qcb,qac->qab", kval, yfield.d1(pts)))
    else:
        def one_form(x):
            return np.einsum("qcb,qc->qb", kfield.value(x), yfield.value(x))

        domega = fd_derivative(one_form, pts, fd_order, fd_step)
    lhs = (np.einsum("qab,qab->q", ginv, domega)
           - np.einsum("qab,qmab,qm->q", ginv, gamma, omega))

    resid = np.abs(lhs - t_div - t_tf - t_tr)
    scale = np.max(np.abs(np.stack([lhs, t_div, t_tf, t_tr])), axis=0)
    return resid, scale


def pohozaev_order_estimate(metric: MetricField, kfield, yfield, pts,
                            fd_order: str = "fd4", base_step: float = 4e-2,
                            levels: int = 3):
    """Empirical truncation order from residuals at halved steps."""
    maxima = []
    for i in range(levels):
        res, _ = pohozaev_residual(metric, kfield, yfield, pts,
                                   fd_step=base_step / 2 ** i,
                                   fd_order=fd_order)
        maxima.append(float(np.max(res)))
    orders = [math.log2(maxima[i] / maxima[i + 1])
              for i in range(levels - 1)]
    return sum(orders) / len(orders), maxima


# ---- boundary identity -----------------------------------------------------


def _sigma_christoffel(metric: MetricField, pts):
    """Induced metric, its inverse, and intrinsic Christoffels on Sigma."""
    t = metric.dim - 1
    d1 = metric.first_derivatives(pts)
    dgam = d1[:, :t, :t, :t]
    gam = metric.metric(pts)[:, :t, :t]
    gaminv = np.linalg.inv(gam)
    a = (np.einsum("qimj->qmij", dgam) + np.einsum("qjmi->qmij", dgam)
         - np.einsum("qmij->qmij", dgam))
    return gam, gaminv, 0.5 * np.einsum("qkm,qmij->qkij", gaminv, a)


def codazzi_residual(metric: MetricField, pts, fd_step: float | None = None,
                     both: bool = False):
    """Defect of div_Sigma(Newton) = Ricci(eta, .) at boundary points.

    The intrinsic divergence differences the Newton tensor along the
    boundary-tangent axes (points stay on Sigma); the flux side contracts
    the ambient Ricci tensor with the outward normal.  Returns
    (residuals, scales), or with `both` also the flipped-sign residuals
    used by the convention selector: (residuals, flipped, scales).
    """
    pts = as_points(pts)
    t = metric.dim - 1
    if fd_step is None:
        fd_step = 1e-6 if metric.backend == "analytic" else 1e-4
    gam, gaminv, sgamma = _sigma_christoffel(metric, pts)
    jval = sigma_geometry(metric, pts).newton

    q = pts.shape[0]
    dj = np.zeros((q, t, t, t))
    for c in range(t):
        hc = fd_step * np.maximum(1.0, np.abs(pts[:, c]))
        acc = np.zeros((q, t, t))
        for off, w in _FD1_STENCILS["fd4"]:
            shifted = pts.copy()
            shifted[:, c] += off * hc
            acc += w * sigma_geometry(metric, shifted).newton
        dj[:, c] = acc / hc[:, None, None]

    nabla_j = (dj - np.einsum("qmcb,qma->qcba", sgamma, jval)
               - np.einsum("qmca,qbm->qcba", sgamma, jval))
    div_j = np.einsum("qcb,qcba->qa", gaminv, nabla_j)

    _, _, _, ric, _ = ricci_batch(metric, pts)
    eta = sigma_outward_normal(metric, pts)
    rhs = np.einsum("qi,qia->qa", eta, ric[:, :, :t])

    def gnorm(v):
        return np.sqrt(np.einsum("qab,qa,qb->q", gaminv, v, v))

    res = gnorm(div_j - rhs)
    flipped = gnorm(div_j + rhs)
    scale = np.maximum(gnorm(div_j), gnorm(rhs))
    if both:
        return res, flipped, scale
    return res, scale


@dataclass
class ConventionSelection:
    """Outcome of the empirical sign check for the boundary identity."""

    selected: str
    residual_selected: float
    residual_flipped: float
    statement: str = CODAZZI_CONVENTION

    @property
    def decisive(self) -> bool:
        return self.residual_flipped > 10.0 * max(self.residual_selected, 1e-300)


def codazzi_convention(metric: MetricField, pts,
                       fd_step: float | None = None) -> ConventionSelection:
    """Evaluate both sign pairings and report which one the data selects."""
    res, flipped, _ = codazzi_residual(metric, pts, fd_step, both=True)
    a, b = float(np.max(res)), float(np.max(flipped))
    if a <= b:
        return ConventionSelection("plus-ricci", a, b)
    return ConventionSelection("minus-ricci", b, a)


# ---- static potentials -----------------------------------------------------


def static_residual(metric: MetricField, wfield, pts) -> np.ndarray:
    """Frobenius norm of the adjoint-operator image of w at each point."""
    res = static_potential_residual(metric, wfield, pts)
    return np.sqrt(np.einsum("qij,qij->q", res, res))


def _static_terms_scale(metric: MetricField, wfield, pts) -> float:
    """Largest individual operator term, for reporting residual scale."""
    pts = as_points(pts)
    g, ginv, gamma, ric, _ = ricci_batch(metric, pts)
    grad = wfield.d1(pts)
    hess = covariant_hessian(gamma, grad, wfield.d2(pts))
    lap = np.einsum("qij,qij->q", ginv, hess)

    def frob(t):
        return np.sqrt(np.einsum("qij,qij->q", t, t))

    w = wfield.value(pts)
    terms = np.stack([frob(hess), np.abs(lap) * frob(g), np.abs(w) * frob(ric)])
    return float(np.max(terms))


def static_boundary_residual(metric: MetricField, wfield, pts) -> np.ndarray:
    """|dw(eta)| at boundary points for the outward unit normal."""
    pts = as_points(pts)
    eta = sigma_outward_normal(metric, pts)
    dw = wfield.d1(pts)
    return np.abs(np.einsum("qi,qi->q", eta, dw))


# ---- decay-rate fits -------------------------------------------------------

_SLOPE_SHIFT_FLAT = {
    "metric": 0.0,
    "first_derivative": 1.0,
    "second_derivative": 2.0,
    "scalar_curvature": 2.0,
    "mean_curvature": 1.0,
}

_NOISE_FLOOR = {
    "metric": 1e-140,
    "first_derivative": 1e-140,
    "second_derivative": 1e-140,
    "scalar_curvature": 1e-11,
    "mean_curvature": 1e-11,
}


@dataclass
class QuantityFit:
    """Log-linear decay fit of one magnitude against the radius ladder."""

    quantity: str
    magnitudes: list[float]
    slope: float | None
    fitted_rate: float
    admissible: bool


@dataclass
class DecayReport:
    """Decay-rate fits, admission verdict, and parity diagnostics."""

    model: str
    dim: int
    radii: list[float]
    seed: int
    rays: int
    threshold: float
    fits: dict[str, QuantityFit]
    odd_fits: dict[str, QuantityFit]
    admitted: bool
    notes: list[str] = field(default_factory=list)


def _ray_directions(n: int, nrays: int, seed: int):
    rng = np.random.default_rng(seed)
    bulk = rng.normal(size=(nrays, n))
    bulk[:, -1] = np.abs(bulk[:, -1]) + 0.1
    bulk /= np.linalg.norm(bulk, axis=1)[:, None]
    tang = rng.normal(size=(nrays, n - 1))
    tang /= np.linalg.norm(tang, axis=1)[:, None]
    sigma = np.zeros((nrays, n))
    sigma[:, : n - 1] = tang
    return bulk, sigma


def _frame_norm(binv: np.ndarray, tensor: np.ndarray, rank: int) -> np.ndarray:
    """Reference-orthonormal-frame Frobenius norm of a lowered tensor."""
    if rank == 2:
        val = np.einsum("qia,qjb,qij,qab->q", binv, binv, tensor, tensor)
    elif rank == 3:
        val = np.einsum("qkc,qia,qjb,qkij,qcab->q",
                        binv, binv, binv, tensor, tensor)
    else:
        val = np.einsum("qld,qkc,qia,qjb,qlkij,qdcab->q",
                        binv, binv, binv, binv, tensor, tensor)
    return np.sqrt(np.abs(val))


def second_covariant_sym2(ref: MetricField, efield, pts) -> np.ndarray:
    """Second reference-covariant derivative of a symmetric bilinear field."""
    pts = as_points(pts)
    _, _, gamma, dgamma = _christoffel_with_derivative(ref, pts)
    e = efield.value(pts)
    de = efield.d1(pts)
    d2e = efield.d2(pts)
    t = (de - np.einsum("qmki,qmj->qkij", gamma, e)
         - np.einsum("qmkj,qim->qkij", gamma, e))
    dt = (d2e
          - np.einsum("qlmki,qmj->qlkij", dgamma, e)
          - np.einsum("qmki,qlmj->qlkij", gamma, de)
          - np.einsum("qlmkj,qim->qlkij", dgamma, e)
          - np.einsum("qmkj,qlim->qlkij", gamma, de))
    return (dt
            - np.einsum("qmlk,qmij->qlkij", gamma, t)
            - np.einsum("qmli,qkmj->qlkij", gamma, t)
            - np.einsum("qmlj,qkim->qlkij", gamma, t))


def fit_decay(radii, magnitudes, scale_kind: str, floor: float):
    """Slope of log magnitude against log r ("power") or r ("exponential").

    Returns (slope, used_count); slope is None when fewer than two samples
    rise above the noise floor.
    """
    radii = np.asarray(radii, dtype=float)
    mags = np.asarray(magnitudes, dtype=float)
    mask = mags > floor
    if np.count_nonzero(mask) < 2:
        return None, int(np.count_nonzero(mask))
    x = np.log(radii[mask]) if scale_kind == "power" else radii[mask]
    slope = np.polyfit(x, np.log(mags[mask]), 1)[0]
    return float(slope), int(np.count_nonzero(mask))


def decay_report(entry: CatalogEntry, radii=None, nrays: int = 6,
                 seed: int = 7771) -> DecayReport:
    """Fit fall-off rates along seeded rays and compare to the model threshold.

    Flat-model magnitudes follow power laws in r; hyperbolic ones are
    exponential in rho and all tensors are measured in the reference
    orthonormal frame.  Admission gates on the metric-magnitude fit alone;
    the remaining fits (derivatives, scalar curvature, boundary mean
    curvature) and the parity diagnostics are informational.
    """
    n = entry.dim
    model = entry.model
    if model not in ("flat", "hyperbolic"):
        raise ConfigError(f"unknown asymptotic model {model!r}")
    radii = list(radii) if radii is not None else default_radii(entry, "geometric")
    bulk_dirs, sigma_dirs = _ray_directions(n, nrays, seed)
    scale_kind = "power" if model == "flat" else "exponential"
    ref_scal = 0.0 if model == "flat" else -float(n * (n - 1))

    names = list(_SLOPE_SHIFT_FLAT)
    mags = {name: [] for name in names}
    odd_names = ["metric", "scalar_curvature"] if model == "flat" else []
    odd_mags = {name: [] for name in odd_names}
    reflect = np.ones(n)
    reflect[: n - 1] = -1.0
    sign_matrix = np.outer(reflect, reflect)

    for r in radii:
        pts = r * bulk_dirs
        binv = entry.reference.inverse(pts)
        e = entry.efield.value(pts)
        mags["metric"].append(float(np.max(_frame_norm(binv, e, 2))))
        de = covariant_derivative_sym2(entry.reference, entry.efield, pts)
        mags["first_derivative"].append(float(np.max(_frame_norm(binv, de, 3))))
        d2e = second_covariant_sym2(entry.reference, entry.efield, pts)
        mags["second_derivative"].append(float(np.max(_frame_norm(binv, d2e, 4))))
        scal = ricci_batch(entry.metric, pts)[4]
        mags["scalar_curvature"].append(float(np.max(np.abs(scal - ref_scal))))
        spts = r * sigma_dirs
        h = sigma_mean_curvature(entry.metric, spts)
        mags["mean_curvature"].append(float(np.max(np.abs(h))))
        if model == "flat":
            refl = pts * reflect
            e_odd = 0.5 * (e - sign_matrix * entry.efield.value(refl))
            odd_mags["metric"].append(float(np.max(_frame_norm(binv, e_odd, 2))))
            scal_refl = ricci_batch(entry.metric, refl)[4]
            odd_mags["scalar_curvature"].append(
                float(np.max(0.5 * np.abs(scal - scal_refl))))

    threshold = 0.5 * (n - 2) if model == "flat" else 0.5 * n
    notes: list[str] = []
    fits: dict[str, QuantityFit] = {}
    for name in names:
        floor = _NOISE_FLOOR[name]
        if name == "scalar_curvature":
            floor = floor * max(1.0, abs(ref_scal))
        slope, used = fit_decay(radii, mags[name], scale_kind, floor)
        if slope is None:
            fits[name] = QuantityFit(name, mags[name], None, math.inf, True)
            notes.append(f"{name}: at noise floor everywhere, rate treated as infinite")
            continue
        shift = _SLOPE_SHIFT_FLAT[name] if model == "flat" else 0.0
        rate = -slope - shift
        fits[name] = QuantityFit(name, mags[name], slope, rate, rate > threshold)
        if used < len(radii):
            notes.append(f"{name}: {len(radii) - used} sample(s) at noise floor")

    odd_fits: dict[str, QuantityFit] = {}
    for name in odd_names:
        slope, _ = fit_decay(radii, odd_mags[name], scale_kind,
                             _NOISE_FLOOR[name])
        if slope is None:
            odd_fits[name] = QuantityFit(f"odd_{name}", odd_mags[name], None,
                                         math.inf, True)
        else:
            odd_fits[name] = QuantityFit(f"odd_{name}", odd_mags[name], slope,
                                         -slope, True)

    admitted = fits["metric"].fitted_rate > threshold
    return DecayReport(model=model, dim=n, radii=radii, seed=seed,
                       rays=nrays, threshold=threshold, fits=fits,
                       odd_fits=odd_fits, admitted=admitted, notes=notes)


# ---- suite used by the command line ----------------------------------------


def _seeded_points(rng, n: int, count: int, lo: float, hi: float,
                   boundary: bool) -> np.ndarray:
    radii = rng.uniform(lo, hi, size=count)
    if boundary:
        dirs = rng.normal(size=(count, n - 1))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        pts = np.zeros((count, n))
        pts[:, : n - 1] = radii[:, None] * dirs
        return pts
    dirs = rng.normal(size=(count, n))
    dirs[:, -1] = np.abs(dirs[:, -1]) + 0.1
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    return radii[:, None] * dirs


def identity_suite(entry: CatalogEntry, seed: int = 4242,
                   npoints: int = 50) -> list[ResidualReport]:
    """Run every pointwise identity against one catalog entry.

    Reports: the divergence identity on seeded polynomial fields, the
    boundary identity with its convention selection, and tensor plus
    boundary residuals for each static generator of the entry's model.
    """
    from .invariants import _weights_for

    n = entry.dim
    metric = entry.metric
    rng = np.random.default_rng(seed)
    # hyperbolic ranges stay short: the static terms grow like cosh(rho),
    # so roundoff in the cancellation grows exponentially with radius
    lo = max(entry.rmin * 1.25 + 0.25, 1.0)
    hi = lo + (9.0 if entry.model == "flat" else 3.0)

    reports: list[ResidualReport] = []

    poho_pts = _seeded_points(rng, n, npoints, lo, lo + 1.5, boundary=False)
    kf, yf = random_polynomial_fields(n, seed)
    tol = 1e-8 if metric.backend == "analytic" else 1e-5
    res, scale = pohozaev_residual(metric, kf, yf, poho_pts)
    reports.append(ResidualReport("pohozaev", poho_pts, res,
                                  float(np.max(scale)), tol, seed))

    sigma_pts = _seeded_points(rng, n, npoints, lo, hi, boundary=True)
    selection = codazzi_convention(metric, sigma_pts)
    res, scale = codazzi_residual(metric, sigma_pts)
    reports.append(ResidualReport(
        "codazzi", sigma_pts, res, float(np.max(scale)), 1e-5, seed,
        notes={"selected": selection.selected,
               "residual_flipped": selection.residual_flipped,
               "decisive": selection.decisive}))

    # static potentials belong to the asymptotic model, so the residuals
    # are taken against the reference metric
    interior = _seeded_points(rng, n, npoints, lo, hi, boundary=False)
    tol_static = 1e-12 if entry.model == "flat" else 1e-8
    for a, w in enumerate(_weights_for(entry)):
        res = static_residual(entry.reference, w, interior)
        reports.append(ResidualReport(
            f"static_tensor_w{a}", interior, res,
            _static_terms_scale(entry.reference, w, interior), tol_static, seed))
        bres = static_boundary_residual(entry.reference, w, sigma_pts)
        dw = w.d1(sigma_pts)
        reports.append(ResidualReport(
            f"static_boundary_w{a}", sigma_pts, bres,
            float(np.max(np.linalg.norm(dw, axis=1))), 1e-10, seed))
    return reports
