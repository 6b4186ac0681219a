"""Built-in catalog of asymptotically flat and hyperbolic half-space metrics.

Every family produces a CatalogEntry whose physical metric, reference metric,
and difference field e = g - ref are exact separable term lists, so analytic
first and second derivatives are available everywhere.  The difference field
is always constructed directly (never by numerically subtracting metrics),
which keeps the charge integrands free of cancellation error.

Families:
  euclidean_half          flat reference itself (all functionals vanish)
  schwarzschild_half      conformally flat, optional tangential offset
  conformal_flat          superposition of two conformal bumps
  generic_perturbation    seeded harmonic bump plus a tangential gauge field
  hyperbolic_half         hyperbolic reference itself
  ads_schwarzschild_half  static spherically symmetric hyperbolic tail
  hyp_perturbation        hyperbolic tail plus radial gauge and a fast
                          boundary-active mixed term

Admission enforces positive mass parameters, tangential offsets, and decay
rates strictly inside the admissible range; metrics are sampled for positive
definiteness at build time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets
from .charges import flat_reference, hyperbolic_reference
from .errors import AdmissionError, ConfigError
from .geometry import MetricField, as_points, rotated_chart
from .separable import (SeparableField, Term, identity_terms,
                        outer_radial_terms, unit_expo, zero_expo)


def power_profile(p: float):
    def prof(r):
        return jets.seed(r) ** p
    return prof


@dataclass
class CatalogEntry:
    name: str
    dim: int
    model: str                      # "flat" or "hyperbolic"
    params: dict
    metric: MetricField
    efield: SeparableField
    reference: MetricField
    decay_rate: float
    rmin: float
    default_ladder: tuple           # (kind, start, step_or_factor, count)
    expected_charge_rate: float | None = None
    seed: int | None = None

    def with_backend(self, backend: str) -> "CatalogEntry":
        out = CatalogEntry(**{**self.__dict__})
        out.metric = self.metric.with_backend(backend)
        return out


# ---- shared helpers ------------------------------------------------------


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise AdmissionError(msg)


def _tangential_offset(n: int, params: dict) -> np.ndarray:
    a = np.zeros(n)
    for alpha in range(n - 1):
        a[alpha] = float(params.get(f"a{alpha + 1}", 0.0))
    return a


def _spd_sample(entry_metric: MetricField, n: int, rmin: float,
                rmax: float, model: str) -> None:
    rng = np.random.default_rng(7)
    radii = np.geomspace(max(rmin, 1e-3), rmax, 12)
    dirs = rng.normal(size=(12, n))
    dirs[:, -1] = np.abs(dirs[:, -1])
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    pts = radii[:, None] * dirs
    bdry = pts.copy()
    bdry[:, -1] = 0.0
    bdry *= (radii / np.maximum(np.linalg.norm(bdry, axis=1), 1e-12))[:, None]
    entry_metric.check_spd(np.vstack([pts, bdry]))


def _sym_grad_power_terms(n: int, specs, scale: float) -> list[Term]:
    """Exact symmetrized gradient of a vector field given as power-law terms.

    Each spec is (axis, coeff, expo, p) describing the component
    coeff * x^expo * |x|^p on the given axis.  Returns rank-2 terms for
    (1/2)(d_k Z_i + d_i Z_k), scaled.
    """
    out: list[Term] = []
    for axis, coeff, expo, p in specs:
        expo = tuple(expo)
        for k in range(n):
            if expo[k] > 0:
                lowered = tuple(e - (1 if j == k else 0)
                                for j, e in enumerate(expo))
                c = 0.5 * scale * coeff * expo[k]
                out.append(Term((k, axis), c, lowered, power_profile(p)))
                out.append(Term((axis, k), c, lowered, power_profile(p)))
            if p != 0.0:
                raised = tuple(e + (1 if j == k else 0)
                               for j, e in enumerate(expo))
                c = 0.5 * scale * coeff * p
                out.append(Term((k, axis), c, raised, power_profile(p - 2.0)))
                out.append(Term((axis, k), c, raised, power_profile(p - 2.0)))
    return out


def _check_dim(n: int) -> None:
    if n not in (3, 4):
        raise ConfigError(f"dimension must be 3 or 4, got {n}")


FLAT_LADDER = ("geometric", 4.0, 2.0, 6)
HYP_LADDER = ("arithmetic", 3.0, 1.0, 6)


# ---- flat-model families -------------------------------------------------


def build_euclidean_half(n: int, params: dict, seed=None) -> CatalogEntry:
    _check_dim(n)
    ref = flat_reference(n)
    e = SeparableField(n, 2, [])
    metric = flat_reference(n)
    return CatalogEntry(
        name="euclidean_half", dim=n, model="flat", params={},
        metric=metric, efield=e, reference=ref, decay_rate=float("inf"),
        rmin=0.1, default_ladder=FLAT_LADDER, expected_charge_rate=None)


def _conformal_terms(n: int, masses, centers):
    """e = (u^{4/(n-2)} - 1) delta for u = 1 + sum m_j / (2 |x-a_j|^{n-2}).

    Cross terms between bumps are handled by expressing u as a sum of
    single-center profiles only when there is one bump; otherwise the
    conformal factor is evaluated jointly per point through a dedicated
    profile on each center with the other bump folded in exactly.
    """
    expo = 4.0 / (n - 2)
    if len(masses) == 1:
        m = masses[0]

        def prof(r, _m=m):
            rj = jets.seed(r)
            u = 1.0 + (_m / 2.0) * rj ** (2 - n)
            return u ** expo - 1.0

        return identity_terms(n, prof, 1.0, tuple(centers[0]))
    raise ValueError("joint profiles handled by caller")


class _TwoBumpConformal:
    """Exact evaluator for e = (u^{4/(n-2)} - 1) delta with two bumps.

    Not separable in a single radius, so value/d1/d2 are assembled from the
    two harmonic profiles by the chain rule.
    """

    def __init__(self, n, masses, centers):
        self.n = n
        self.masses = masses
        self.centers = [np.asarray(c, dtype=float) for c in centers]
        self.expo = 4.0 / (n - 2)

    def _u(self, pts):
        n = self.n
        u = np.ones(pts.shape[0])
        du = np.zeros_like(pts)
        d2u = np.zeros((pts.shape[0], n, n))
        eye = np.eye(n)
        for m, c in zip(self.masses, self.centers):
            x = pts - c[None, :]
            r = np.linalg.norm(x, axis=1)
            u += (m / 2.0) * r ** (2 - n)
            coef = (m / 2.0) * (2 - n)
            du += coef * r[:, None] ** (-n) * x
            d2u += coef * (r[:, None, None] ** (-n) * eye
                           - n * r[:, None, None] ** (-n - 2)
                           * x[:, :, None] * x[:, None, :])
        return u, du, d2u

    def value(self, pts):
        pts = as_points(pts)
        u, _, _ = self._u(pts)
        f = u ** self.expo - 1.0
        return f[:, None, None] * np.eye(self.n)

    def d1(self, pts):
        pts = as_points(pts)
        u, du, _ = self._u(pts)
        fp = self.expo * u ** (self.expo - 1.0)
        return (fp[:, None] * du)[:, :, None, None] * np.eye(self.n)

    def d2(self, pts):
        pts = as_points(pts)
        u, du, d2u = self._u(pts)
        fp = self.expo * u ** (self.expo - 1.0)
        fpp = self.expo * (self.expo - 1.0) * u ** (self.expo - 2.0)
        core = (fpp[:, None, None] * du[:, :, None] * du[:, None, :]
                + fp[:, None, None] * d2u)
        return core[:, :, :, None, None] * np.eye(self.n)


class _SumField:
    """Pointwise sum of fields sharing the value/d1/d2 protocol."""

    def __init__(self, *fields):
        self.fields = fields

    def value(self, pts):
        return sum(f.value(pts) for f in self.fields)

    def d1(self, pts):
        return sum(f.d1(pts) for f in self.fields)

    def d2(self, pts):
        return sum(f.d2(pts) for f in self.fields)


def build_schwarzschild_half(n: int, params: dict, seed=None) -> CatalogEntry:
    _check_dim(n)
    m = float(params.get("m", 1.0))
    _require(m > 0, f"mass parameter must be positive, got m={m}")
    a = _tangential_offset(n, params)
    expo = 4.0 / (n - 2)

    def prof(r):
        rj = jets.seed(r)
        u = 1.0 + (m / 2.0) * rj ** (2 - n)
        return u ** expo - 1.0

    eterms = identity_terms(n, prof, 1.0, tuple(a))
    e = SeparableField(n, 2, eterms)
    gterms = identity_terms(n, None) + eterms
    horizon = (m / 2.0) ** (1.0 / (n - 2))
    rmin = 1.2 * horizon + float(np.linalg.norm(a))
    metric = MetricField.from_separable(
        SeparableField(n, 2, gterms), name="schwarzschild_half",
        domain_rmin=rmin, params={"m": m})
    _spd_sample(metric, n, rmin, 200.0, "flat")
    used = {"m": m}
    for alpha in range(n - 1):
        if a[alpha] != 0.0:
            used[f"a{alpha + 1}"] = a[alpha]
    return CatalogEntry(
        name="schwarzschild_half", dim=n, model="flat", params=used,
        metric=metric, efield=e, reference=flat_reference(n),
        decay_rate=float(n - 2), rmin=rmin, default_ladder=FLAT_LADDER,
        expected_charge_rate=float(n - 2))


def build_conformal_flat(n: int, params: dict, seed=None) -> CatalogEntry:
    _check_dim(n)
    m1 = float(params.get("m1", 1.0))
    m2 = float(params.get("m2", 0.5))
    sep = float(params.get("sep", 2.0))
    _require(m1 > 0, f"bump mass must be positive, got m1={m1}")
    _require(m2 >= 0, f"bump mass must be nonnegative, got m2={m2}")
    _require(sep >= 0, f"separation must be nonnegative, got sep={sep}")
    c1 = np.zeros(n)
    c2 = np.zeros(n)
    c1[0] = sep / 2.0
    c2[0] = -sep / 2.0

    if m2 == 0.0:
        eterms = _conformal_terms(n, [m1], [c1])
        e_obj = SeparableField(n, 2, eterms)
        gsep = SeparableField(n, 2, identity_terms(n, None) + eterms)
        metric = MetricField.from_separable(
            gsep, name="conformal_flat", params={"m1": m1, "sep": sep})
    else:
        e_obj = _TwoBumpConformal(n, [m1, m2], [c1, c2])
        ref = flat_reference(n)

        def func(pts):
            return ref.metric(pts) + e_obj.value(pts)

        def d1func(pts):
            return e_obj.d1(pts)

        def d2func(pts):
            return e_obj.d2(pts)

        metric = MetricField(dim=n, func=func, d1func=d1func, d2func=d2func,
                             name="conformal_flat",
                             params={"m1": m1, "m2": m2, "sep": sep})
    horizon = ((m1 + m2) / 2.0) ** (1.0 / (n - 2))
    rmin = 1.2 * horizon + sep / 2.0 + 0.2
    metric.domain_rmin = rmin
    _spd_sample(metric, n, rmin, 200.0, "flat")
    return CatalogEntry(
        name="conformal_flat", dim=n, model="flat",
        params={"m1": m1, "m2": m2, "sep": sep},
        metric=metric, efield=e_obj, reference=flat_reference(n),
        decay_rate=float(n - 2), rmin=rmin, default_ladder=FLAT_LADDER,
        expected_charge_rate=float(n - 2))


def build_generic_perturbation(n: int, params: dict, seed=None) -> CatalogEntry:
    """Harmonic conformal bump plus a seeded tangential gauge deformation.

    The bump (strength C) carries the entire charge; the gauge part is the
    symmetrized gradient of a seeded vector field tangent to the boundary
    with decay |x|^{-tau}, which moves every curve at finite radius but not
    the limits.  A normal-tangential component switches on the corner
    integrand for the tangential weights.
    """
    _check_dim(n)
    tau = float(params.get("tau", 0.8 if n == 3 else 1.2))
    amp = float(params.get("amp", 0.03))
    strength = float(params.get("c", 2.0))
    _require(tau > (n - 2) / 2.0,
             f"decay rate tau={tau} not admissible: need tau > {(n - 2) / 2.0}")
    _require(strength > 0, f"bump strength must be positive, got c={strength}")
    _require(abs(amp) <= 0.2, f"gauge amplitude too large for definiteness: {amp}")
    if seed is None:
        seed = int(params.get("seed", 1234))
    rng = np.random.default_rng(seed)

    specs = []
    # tangential components Z_alpha
    for alpha in range(n - 1):
        p_c = rng.uniform(-1.0, 1.0)
        specs.append((alpha, p_c, zero_expo(n), 1.0 - tau))
        for beta in range(n - 1):
            q_c = rng.uniform(-1.0, 1.0)
            specs.append((alpha, q_c, unit_expo(n, beta), -tau))
        u_c = rng.uniform(-1.0, 1.0)
        specs.append((alpha, u_c, unit_expo(n, n - 1), -tau))
        v_c = rng.uniform(0.5, 1.0) * (1 if rng.uniform() < 0.5 else -1)
        specs.append((alpha, v_c, unit_expo(n, alpha, n - 1), -tau - 1.0))
    # normal component vanishing on the boundary
    s_c = rng.uniform(-1.0, 1.0)
    specs.append((n - 1, s_c, unit_expo(n, n - 1), -tau))

    gauge_terms = _sym_grad_power_terms(n, specs, amp)
    bump_terms = identity_terms(n, power_profile(float(2 - n)), strength)
    eterms = bump_terms + gauge_terms
    e = SeparableField(n, 2, eterms)
    gsep = SeparableField(n, 2, identity_terms(n, None) + eterms)
    rmin = 0.75
    metric = MetricField.from_separable(
        gsep, name="generic_perturbation", domain_rmin=rmin,
        params={"tau": tau, "amp": amp, "c": strength, "seed": seed})
    _spd_sample(metric, n, rmin, 300.0, "flat")
    return CatalogEntry(
        name="generic_perturbation", dim=n, model="flat",
        params={"tau": tau, "amp": amp, "c": strength, "seed": seed},
        metric=metric, efield=e, reference=flat_reference(n),
        decay_rate=tau, rmin=rmin, default_ladder=FLAT_LADDER,
        expected_charge_rate=None, seed=seed)


# ---- hyperbolic-model families --------------------------------------------


def build_hyperbolic_half(n: int, params: dict, seed=None) -> CatalogEntry:
    _check_dim(n)
    ref = hyperbolic_reference(n)
    e = SeparableField(n, 2, [])
    return CatalogEntry(
        name="hyperbolic_half", dim=n, model="hyperbolic", params={},
        metric=hyperbolic_reference(n), efield=e, reference=ref,
        decay_rate=float("inf"), rmin=0.1, default_ladder=HYP_LADDER,
        expected_charge_rate=None)


def _ads_horizon(n: int, m: float) -> float:
    # unique root of s^{n-2} (1 + s^2) = 2 m
    s = max(1.0, (2.0 * m) ** (1.0 / n))
    for _ in range(60):
        f = s ** (n - 2) * (1.0 + s * s) - 2.0 * m
        fp = (n - 2) * s ** (n - 3) * (1.0 + s * s) + 2.0 * s ** (n - 1)
        step = f / fp
        s -= step
        if abs(step) < 1e-14 * max(1.0, s):
            break
    return float(np.arcsinh(s))


def _ads_tail_profile(n: int, m: float):
    # A - 1 = 2 m s^{2-n} / V written without the large-radius cancellation
    def prof(r):
        rj = jets.seed(r)
        s = jets.sinh(rj)
        top = 2.0 * m * s ** (2 - n)
        v = 1.0 + s ** 2 - top
        return top / (v * rj ** 2)
    return prof


def build_ads_schwarzschild_half(n: int, params: dict, seed=None) -> CatalogEntry:
    _check_dim(n)
    m = float(params.get("m", 1.0))
    _require(m > 0, f"mass parameter must be positive, got m={m}")
    eterms = outer_radial_terms(n, _ads_tail_profile(n, m))
    e = SeparableField(n, 2, eterms)
    rho_h = _ads_horizon(n, m)
    rmin = rho_h + 0.35
    ref = hyperbolic_reference(n)
    bterms = (identity_terms(n, _sinh_sq_over) +
              outer_radial_terms(n, _one_minus_f_over))
    gsep = SeparableField(n, 2, bterms + eterms)
    metric = MetricField.from_separable(
        gsep, name="ads_schwarzschild_half", domain_rmin=rmin,
        params={"m": m})
    _spd_sample(metric, n, rmin, 12.0, "hyperbolic")
    return CatalogEntry(
        name="ads_schwarzschild_half", dim=n, model="hyperbolic",
        params={"m": m}, metric=metric, efield=e, reference=ref,
        decay_rate=float(n), rmin=rmin, default_ladder=HYP_LADDER,
        expected_charge_rate=None)


def _sinh_sq_over(r):
    rj = jets.seed(r)
    return (jets.sinh(rj) / rj) ** 2


def _one_minus_f_over(r):
    rj = jets.seed(r)
    f = (jets.sinh(rj) / rj) ** 2
    return (1.0 - f) / rj ** 2


def build_hyp_perturbation(n: int, params: dict, seed=None) -> CatalogEntry:
    """Hyperbolic tail plus an exact radial gauge field and a fast mixed term.

    The gauge field is the deformation of the reference by the flow of
    lam(rho) d_rho with lam = -(eps/sigma) exp(-sigma rho); it shifts every
    finite-radius curve but no limit.  The mixed term couples the radial
    direction to a rotation covector in the (x_1, x_n) plane; it decays fast
    enough to leave all limits alone but switches on the corner integrand
    for the first tangential weight.
    """
    _check_dim(n)
    m = float(params.get("m", 0.5))
    eps = float(params.get("eps", 0.05))
    mix = float(params.get("mix", 0.04))
    _require(m > 0, f"tail mass must be positive, got m={m}")
    _require(abs(eps) <= 0.3, f"gauge amplitude too large: eps={eps}")
    _require(abs(mix) <= 0.3, f"mixed amplitude too large: mix={mix}")
    sigma = 0.6 * n
    fast = n + 0.5

    tail_terms = outer_radial_terms(n, _ads_tail_profile(n, m))

    def g1_prof(r):
        rj = jets.seed(r)
        lam = (-eps / sigma) * jets.exp(rj * (-sigma))
        return 2.0 * lam * jets.sinh(rj) * jets.cosh(rj) / rj ** 2

    def g2_prof(r):
        rj = jets.seed(r)
        lam = (-eps / sigma) * jets.exp(rj * (-sigma))
        lamp = eps * jets.exp(rj * (-sigma))
        g1 = 2.0 * lam * jets.sinh(rj) * jets.cosh(rj) / rj ** 2
        return (2.0 * lamp - g1) / rj ** 2

    gauge_terms = (identity_terms(n, g1_prof) +
                   outer_radial_terms(n, g2_prof))

    def mix_prof(r):
        rj = jets.seed(r)
        return mix * jets.exp(rj * (-fast)) / rj

    mixed_terms: list[Term] = []
    for i in range(n):
        # (theta_i omega_j + omega_i theta_j) with omega = z_1 dz_n - z_n dz_1
        mixed_terms.append(Term((i, n - 1), 1.0, unit_expo(n, i, 0), mix_prof))
        mixed_terms.append(Term((i, 0), -1.0, unit_expo(n, i, n - 1), mix_prof))
        mixed_terms.append(Term((n - 1, i), 1.0, unit_expo(n, i, 0), mix_prof))
        mixed_terms.append(Term((0, i), -1.0, unit_expo(n, i, n - 1), mix_prof))

    eterms = tail_terms + gauge_terms + mixed_terms
    e = SeparableField(n, 2, eterms)
    bterms = (identity_terms(n, _sinh_sq_over) +
              outer_radial_terms(n, _one_minus_f_over))
    rho_h = _ads_horizon(n, m)
    rmin = max(rho_h + 0.35, 1.0)
    metric = MetricField.from_separable(
        SeparableField(n, 2, bterms + eterms), name="hyp_perturbation",
        domain_rmin=rmin, params={"m": m, "eps": eps, "mix": mix})
    _spd_sample(metric, n, rmin, 12.0, "hyperbolic")
    return CatalogEntry(
        name="hyp_perturbation", dim=n, model="hyperbolic",
        params={"m": m, "eps": eps, "mix": mix}, metric=metric, efield=e,
        reference=hyperbolic_reference(n), decay_rate=sigma, rmin=rmin,
        default_ladder=HYP_LADDER, expected_charge_rate=None)


# ---- rotations -------------------------------------------------------------


class RotatedTensorField:
    """Pullback Q^T e(Qx) Q of a rank-2 field under a chart rotation."""

    def __init__(self, base, q: np.ndarray):
        self.base = base
        self.q = np.asarray(q, dtype=float)

    def _push(self, pts):
        return as_points(pts) @ self.q.T

    def value(self, pts):
        e = self.base.value(self._push(pts))
        return np.einsum("ai,bj,qab->qij", self.q, self.q, e)

    def d1(self, pts):
        d1 = self.base.d1(self._push(pts))
        return np.einsum("ck,ai,bj,qcab->qkij", self.q, self.q, self.q, d1)

    def d2(self, pts):
        d2 = self.base.d2(self._push(pts))
        return np.einsum("ck,dl,ai,bj,qcdab->qklij", self.q, self.q,
                         self.q, self.q, d2)


def tangential_rotation(n: int, angle: float, axes: tuple[int, int] = (0, 1)) -> np.ndarray:
    """Rotation in a tangential coordinate plane, fixing the boundary normal."""
    i, j = axes
    if n - 1 in (i, j):
        raise ConfigError("rotation must fix the boundary normal axis")
    q = np.eye(n)
    c, s = math.cos(angle), math.sin(angle)
    q[i, i] = c
    q[i, j] = -s
    q[j, i] = s
    q[j, j] = c
    return q


def rotate_entry(entry: CatalogEntry, q: np.ndarray) -> CatalogEntry:
    """The same geometry presented in a rotated chart.

    Both reference metrics are rotation invariant, so only the physical
    metric and the difference field transform.
    """
    out = CatalogEntry(**{**entry.__dict__})
    out.metric = rotated_chart(entry.metric, q)
    out.efield = RotatedTensorField(entry.efield, q)
    out.name = entry.name + "+rotated"
    return out


# ---- registry ---------------------------------------------------------------


@dataclass(frozen=True)
class FamilyInfo:
    name: str
    model: str
    builder: Callable
    defaults: dict
    doc: str


FAMILIES: dict[str, FamilyInfo] = {
    "euclidean_half": FamilyInfo(
        "euclidean_half", "flat", build_euclidean_half, {},
        "flat half-space; every functional is zero"),
    "schwarzschild_half": FamilyInfo(
        "schwarzschild_half", "flat", build_schwarzschild_half,
        {"m": 1.0, "a1": 0.0, "a2": 0.0},
        "conformally flat static metric, optional tangential offset a1, a2"),
    "conformal_flat": FamilyInfo(
        "conformal_flat", "flat", build_conformal_flat,
        {"m1": 1.0, "m2": 0.5, "sep": 2.0},
        "two conformal bumps of masses m1, m2 separated along the first axis"),
    "generic_perturbation": FamilyInfo(
        "generic_perturbation", "flat", build_generic_perturbation,
        {"tau": 0.8, "amp": 0.03, "c": 2.0, "seed": 1234},
        "seeded slow-decay deformation with an exactly known mass"),
    "hyperbolic_half": FamilyInfo(
        "hyperbolic_half", "hyperbolic", build_hyperbolic_half, {},
        "hyperbolic half-space; every functional is zero"),
    "ads_schwarzschild_half": FamilyInfo(
        "ads_schwarzschild_half", "hyperbolic", build_ads_schwarzschild_half,
        {"m": 1.0},
        "static spherically symmetric hyperbolic tail of mass parameter m"),
    "hyp_perturbation": FamilyInfo(
        "hyp_perturbation", "hyperbolic", build_hyp_perturbation,
        {"m": 0.5, "eps": 0.05, "mix": 0.04},
        "hyperbolic tail plus radial gauge and boundary-active mixed term"),
}


def catalog_names() -> list[str]:
    return list(FAMILIES.keys())


def build(name: str, n: int = 3, params: dict | None = None,
          seed: int | None = None, backend: str = "analytic") -> CatalogEntry:
    if name not in FAMILIES:
        raise ConfigError(
            f"unknown metric family {name!r}; available: {', '.join(FAMILIES)}")
    info = FAMILIES[name]
    params = dict(params or {})
    unknown = set(params) - set(info.defaults)
    if unknown:
        raise ConfigError(
            f"unknown parameters for {name}: {sorted(unknown)}; "
            f"accepted: {sorted(info.defaults)}")
    entry = info.builder(n, params, seed=seed)
    if backend != "analytic":
        entry = entry.with_backend(backend)
    return entry
