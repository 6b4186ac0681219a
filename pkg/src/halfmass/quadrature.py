"""Quadrature patches on half-space charts and sequence extrapolation.

A Patch bundles chart points, the Jacobian of the parametrization, and
parameter-space weights.  Surface and volume measures are never hardcoded:
integration multiplies the weights by sqrt(det(J^T g J)) for whichever
metric is being used, so the same patch serves reference and physical
measures.

Sphere angles use Gauss-Legendre nodes except the final periodic azimuth,
which uses the (spectrally accurate) equispaced rule.  The hemisphere is
parametrized by the colatitude from the +x_n pole, so its boundary is the
corner sphere {|x'| = r, x_n = 0}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import MetricField, as_points


@dataclass
class Patch:
    points: np.ndarray    # (N, n) chart points
    jac: np.ndarray       # (N, n, d) tangent columns of the parametrization
    weights: np.ndarray   # (N,) parameter-space weights
    dim: int              # d, the patch dimension


def _gl(npts: int, a: float, b: float):
    t, w = np.polynomial.legendre.leggauss(npts)
    return (a + b) / 2.0 + (b - a) / 2.0 * t, (b - a) / 2.0 * w


def _sphere_nodes(k: int, polar: int, azimuth: int):
    """Full unit k-sphere in R^{k+1}: returns (points, jac, weights)."""
    if k == 0:
        pts = np.array([[1.0], [-1.0]])
        jac = np.zeros((2, 1, 0))
        return pts, jac, np.ones(2)
    if k == 1:
        phi = 2.0 * np.pi * (np.arange(azimuth) + 0.5) / azimuth
        pts = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        jac = np.stack([-np.sin(phi), np.cos(phi)], axis=1)[:, :, None]
        w = np.full(azimuth, 2.0 * np.pi / azimuth)
        return pts, jac, w
    chi, wchi = _gl(polar, 0.0, np.pi)
    sub_pts, sub_jac, sub_w = _sphere_nodes(k - 1, polar, azimuth)
    npts = chi.size * sub_pts.shape[0]
    pts = np.empty((npts, k + 1))
    jac = np.zeros((npts, k + 1, k))
    w = np.empty(npts)
    idx = 0
    for c, wc in zip(chi, wchi):
        m = sub_pts.shape[0]
        sl = slice(idx, idx + m)
        pts[sl, :k] = np.sin(c) * sub_pts
        pts[sl, k] = np.cos(c)
        jac[sl, :k, 0] = np.cos(c) * sub_pts
        jac[sl, k, 0] = -np.sin(c)
        jac[sl, :k, 1:] = np.sin(c) * sub_jac
        w[sl] = wc * sub_w
        idx += m
    return pts, jac, w


@dataclass(frozen=True)
class QuadratureRule:
    """Angular and radial orders for the standard patches."""

    polar: int = 48
    azimuth: int = 96
    radial: int = 32

    @classmethod
    def default_for(cls, n: int) -> "QuadratureRule":
        if n <= 3:
            return cls()
        return cls(polar=24, azimuth=48, radial=16)


def hemisphere_patch(n: int, r: float, rule: QuadratureRule) -> Patch:
    """The half coordinate sphere {|x| = r, x_n >= 0}."""
    psi, wpsi = _gl(rule.polar, 0.0, np.pi / 2.0)
    upts, ujac, uw = _sphere_nodes(n - 2, rule.polar, rule.azimuth)
    m = upts.shape[0]
    npts = psi.size * m
    pts = np.empty((npts, n))
    jac = np.zeros((npts, n, n - 1))
    w = np.empty(npts)
    idx = 0
    for p, wp in zip(psi, wpsi):
        sl = slice(idx, idx + m)
        pts[sl, : n - 1] = r * np.sin(p) * upts
        pts[sl, n - 1] = r * np.cos(p)
        jac[sl, : n - 1, 0] = r * np.cos(p) * upts
        jac[sl, n - 1, 0] = -r * np.sin(p)
        jac[sl, : n - 1, 1:] = r * np.sin(p) * ujac
        w[sl] = wp * uw
        idx += m
    return Patch(points=pts, jac=jac, weights=w, dim=n - 1)


def corner_sphere_patch(n: int, r: float, rule: QuadratureRule) -> Patch:
    """The corner sphere {|x'| = r, x_n = 0} inside the boundary plane."""
    upts, ujac, uw = _sphere_nodes(n - 2, rule.polar, rule.azimuth)
    m = upts.shape[0]
    pts = np.zeros((m, n))
    pts[:, : n - 1] = r * upts
    jac = np.zeros((m, n, n - 2))
    jac[:, : n - 1, :] = r * ujac
    return Patch(points=pts, jac=jac, weights=uw.copy(), dim=n - 2)


def boundary_annulus_patch(n: int, r0: float, r1: float,
                           rule: QuadratureRule) -> Patch:
    """The annulus {r0 <= |x'| <= r1, x_n = 0} in the boundary plane."""
    s, ws = _gl(rule.radial, r0, r1)
    upts, ujac, uw = _sphere_nodes(n - 2, rule.polar, rule.azimuth)
    m = upts.shape[0]
    npts = s.size * m
    pts = np.zeros((npts, n))
    jac = np.zeros((npts, n, n - 1))
    w = np.empty(npts)
    idx = 0
    for sv, wv in zip(s, ws):
        sl = slice(idx, idx + m)
        pts[sl, : n - 1] = sv * upts
        jac[sl, : n - 1, 0] = upts
        jac[sl, : n - 1, 1:] = sv * ujac
        w[sl] = wv * uw
        idx += m
    return Patch(points=pts, jac=jac, weights=w, dim=n - 1)


def half_shell_patch(n: int, r0: float, r1: float,
                     rule: QuadratureRule) -> Patch:
    """The solid half shell {r0 <= |x| <= r1, x_n >= 0}."""
    s, ws = _gl(rule.radial, r0, r1)
    hemi = hemisphere_patch(n, 1.0, rule)
    m = hemi.points.shape[0]
    npts = s.size * m
    pts = np.empty((npts, n))
    jac = np.zeros((npts, n, n))
    w = np.empty(npts)
    idx = 0
    for sv, wv in zip(s, ws):
        sl = slice(idx, idx + m)
        pts[sl] = sv * hemi.points
        jac[sl, :, 0] = hemi.points
        jac[sl, :, 1:] = sv * hemi.jac
        w[sl] = wv * hemi.weights
        idx += m
    return Patch(points=pts, jac=jac, weights=w, dim=n)


# ---- integration --------------------------------------------------------


def measure_density(metric: MetricField, patch: Patch) -> np.ndarray:
    """sqrt(det(J^T g J)) at the patch points."""
    g = metric.metric(patch.points)
    gram = np.einsum("qia,qij,qjb->qab", patch.jac, g, patch.jac)
    if patch.dim == 0:
        return np.ones(patch.points.shape[0])
    return np.sqrt(np.linalg.det(gram))


def integrate_values(metric: MetricField, patch: Patch,
                     values: np.ndarray) -> float:
    return float(np.sum(patch.weights * values * measure_density(metric, patch)))


def integrate(metric: MetricField, patch: Patch, fn) -> float:
    return integrate_values(metric, patch, fn(patch.points))


def split_patch(patch: Patch, chunk: int):
    npts = patch.points.shape[0]
    for start in range(0, npts, chunk):
        sl = slice(start, min(start + chunk, npts))
        yield Patch(points=patch.points[sl], jac=patch.jac[sl],
                    weights=patch.weights[sl], dim=patch.dim)


def integrate_chunked(metric: MetricField, patch: Patch, fn,
                      chunk: int = 16384) -> float:
    total = 0.0
    for sub in split_patch(patch, chunk):
        total += integrate_values(metric, sub, fn(sub.points))
    return total


# ---- radius ladders and extrapolation -----------------------------------


def radius_ladder(start: float, factor: float, count: int) -> list[float]:
    return [start * factor ** k for k in range(count)]


def arithmetic_ladder(start: float, step: float, count: int) -> list[float]:
    return [start + step * k for k in range(count)]


def _aitken_once(x: np.ndarray) -> np.ndarray:
    d1 = x[1:] - x[:-1]
    denom = d1[1:] - d1[:-1]
    scale = np.max(np.abs(x)) + 1e-300
    out = []
    for k in range(x.size - 2):
        if abs(denom[k]) < 1e-14 * scale:
            out.append(x[k + 2])
        else:
            out.append(x[k + 2] - d1[k + 1] ** 2 / denom[k])
    return np.array(out)


def aitken_limit(samples) -> tuple[float, float]:
    """Aitken delta-squared cascade; returns (limit, error estimate)."""
    x = np.asarray(samples, dtype=float)
    if x.size == 1:
        return float(x[0]), float("inf")
    if x.size == 2:
        return float(x[1]), abs(float(x[1] - x[0]))
    prev_tail = float(x[-1])
    err = abs(float(x[-1] - x[-2]))
    cur = x
    while cur.size >= 3:
        nxt = _aitken_once(cur)
        err = abs(float(nxt[-1]) - prev_tail)
        prev_tail = float(nxt[-1])
        cur = nxt
    return prev_tail, err


@dataclass
class LimitEstimate:
    radii: list[float]
    samples: list[float]
    limit: float
    error: float
    rate: float | None
    ladder: str                 # "geometric" or "arithmetic"
    flags: list[str] = field(default_factory=list)
    extrapolants: list[float] = field(default_factory=list)

    @property
    def converged_cleanly(self) -> bool:
        return not self.flags


def _ladder_kind(radii: np.ndarray) -> str:
    if radii.size >= 3:
        ratios = radii[1:] / radii[:-1]
        if np.allclose(ratios, ratios[0], rtol=1e-9):
            diffs = radii[1:] - radii[:-1]
            if not np.allclose(diffs, diffs[0], rtol=1e-9):
                return "geometric"
    return "arithmetic"


def estimate_limit(radii, samples, expected_rate: float | None = None,
                   rate_tolerance: float = 0.5,
                   noise_floor: float = 0.0) -> LimitEstimate:
    """Extrapolate a radius-indexed sequence to its limit.

    The convergence rate is measured from successive differences: for a
    geometric radius ladder the model is value + C r^{-p}, for an arithmetic
    ladder value + C exp(-p r).  When `expected_rate` is given and the
    measured rate deviates by more than `rate_tolerance` (relative), the
    estimate is flagged.

    `noise_floor` is an absolute magnitude below which the whole sequence
    counts as zero at working precision; rate diagnostics are meaningless
    for such pure-roundoff data, so the estimate is returned unflagged.
    """
    radii = np.asarray(radii, dtype=float)
    x = np.asarray(samples, dtype=float)
    kind = _ladder_kind(radii)
    scale = np.max(np.abs(x)) + 1e-300
    flags: list[str] = []

    if noise_floor > 0.0 and np.max(np.abs(x)) <= noise_floor:
        extrapolants = []
        for k in range(x.size):
            lim_k, _ = aitken_limit(x[: k + 1])
            extrapolants.append(lim_k)
        return LimitEstimate(radii=list(radii), samples=list(x),
                             limit=float(x[-1]),
                             error=float(np.max(np.abs(x))),
                             rate=None, ladder=kind, flags=flags,
                             extrapolants=extrapolants)

    extrapolants = []
    for k in range(x.size):
        lim_k, _ = aitken_limit(x[: k + 1])
        extrapolants.append(lim_k)

    deltas = x[1:] - x[:-1]
    rate = None
    if deltas.size >= 2 and np.all(np.abs(deltas[-2:]) > 1e-13 * scale):
        q = deltas[-1] / deltas[-2]
        if 0 < abs(q) < 1:
            if kind == "geometric":
                rate = -np.log(abs(q)) / np.log(radii[-1] / radii[-2])
            else:
                rate = -np.log(abs(q)) / (radii[-1] - radii[-2])

    if deltas.size and np.all(np.abs(deltas[max(0, deltas.size - 2):])
                              <= 1e-12 * scale):
        # sequence already flat at working precision
        return LimitEstimate(radii=list(radii), samples=list(x),
                             limit=float(x[-1]),
                             error=float(np.max(np.abs(deltas[-2:]))
                                         if deltas.size >= 2 else abs(deltas[-1])),
                             rate=rate, ladder=kind, flags=flags,
                             extrapolants=extrapolants)

    limit, err = aitken_limit(x)
    err = max(err, abs(extrapolants[-1] - extrapolants[-2])
              if x.size >= 2 else err)

    if deltas.size >= 2 and rate is None and np.any(
            np.abs(deltas[-2:]) > 1e-10 * scale):
        flags.append("non-contracting tail: successive differences do not shrink")
    if expected_rate is not None and rate is not None:
        if abs(rate - expected_rate) > rate_tolerance * abs(expected_rate):
            flags.append(
                f"rate mismatch: measured {rate:.3f}, expected {expected_rate:.3f}")

    return LimitEstimate(radii=list(radii), samples=list(x), limit=float(limit),
                         error=float(err), rate=None if rate is None else float(rate),
                         ladder=kind, flags=flags, extrapolants=extrapolants)
