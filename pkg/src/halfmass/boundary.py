"""Hypersurface geometry along the noncompact boundary {x_n = 0}.

Both asymptotic models share a chart in which the boundary is the coordinate
plane Sigma = {x_n = 0} and the interior is {x_n > 0}.  Tangential indices
run over the first n-1 axes.  The outward unit normal eta points in the
negative x_n direction (out of the manifold).

Second fundamental form convention: Pi(X, Y) = g(nabla_X eta, Y) for
tangential X, Y.  With the outward normal of a round sphere this makes the
sphere's mean curvature positive; the empirical orientation check lives in
the identities module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import MetricField, as_points, christoffel_batch


def normalize_covector(metric: MetricField, pts, omega: np.ndarray,
                       sign: float = 1.0) -> np.ndarray:
    """Unit vector field sign * g^{-1} omega / |omega|_g, batched."""
    pts = as_points(pts)
    ginv = metric.inverse(pts)
    raised = np.einsum("qij,qj->qi", ginv, omega)
    norm = np.sqrt(np.einsum("qi,qi->q", omega, raised))
    return sign * raised / norm[:, None]


def sigma_outward_normal(metric: MetricField, pts) -> np.ndarray:
    """g-unit normal to {x_n = 0} pointing out of {x_n >= 0}."""
    pts = as_points(pts)
    omega = np.zeros_like(pts)
    omega[:, -1] = 1.0
    return normalize_covector(metric, pts, omega, sign=-1.0)


def hemisphere_outward_normal(metric: MetricField, pts) -> np.ndarray:
    """g-unit normal to the coordinate sphere |x| = const, pointing outward."""
    pts = as_points(pts)
    r = np.linalg.norm(pts, axis=1)
    return normalize_covector(metric, pts, pts / r[:, None], sign=1.0)


def corner_conormal(metric: MetricField, pts) -> np.ndarray:
    """Outward unit conormal of the corner sphere inside (Sigma, gamma).

    Points must lie on Sigma.  The conormal is tangent to Sigma, normal to
    the sphere |x'| = const within it, unit for the induced metric, and is
    returned with an ambient zero in the last slot.
    """
    pts = as_points(pts)
    n = pts.shape[1]
    gam = induced_metric(metric, pts)
    gam_inv = np.linalg.inv(gam)
    xp = pts[:, : n - 1]
    omega = xp / np.linalg.norm(xp, axis=1)[:, None]
    raised = np.einsum("qab,qb->qa", gam_inv, omega)
    norm = np.sqrt(np.einsum("qa,qa->q", omega, raised))
    out = np.zeros_like(pts)
    out[:, : n - 1] = raised / norm[:, None]
    return out


def induced_metric(metric: MetricField, pts) -> np.ndarray:
    """Tangential block gamma_ab = g_ab, a, b < n, at boundary points."""
    g = metric.metric(pts)
    return g[:, :-1, :-1]


@dataclass
class SigmaGeometry:
    """Extrinsic data of the boundary plane at a batch of points."""

    gamma: np.ndarray        # (N, n-1, n-1) induced metric
    eta: np.ndarray          # (N, n) outward unit normal
    second_form: np.ndarray  # (N, n-1, n-1) Pi w.r.t. eta
    mean_curvature: np.ndarray  # (N,)
    newton: np.ndarray       # (N, n-1, n-1) Pi - H gamma


def sigma_geometry(metric: MetricField, pts) -> SigmaGeometry:
    """Second fundamental form, mean curvature, and Newton tensor of Sigma.

    Uses Pi_ab = -eta_flat(Gamma(e_a, e_b)), valid on Sigma because the
    normal there is g-orthogonal to the coordinate tangent frame.
    """
    pts = as_points(pts)
    g = metric.metric(pts)
    ginv = np.linalg.inv(g)
    gamma_sym = christoffel_batch(metric, pts)
    eta = sigma_outward_normal(metric, pts)
    eta_flat = np.einsum("qij,qj->qi", g, eta)
    pi_full = -np.einsum("qk,qkij->qij", eta_flat, gamma_sym)
    pi = pi_full[:, :-1, :-1]
    gam = g[:, :-1, :-1]
    gam_inv = np.linalg.inv(gam)
    h = np.einsum("qab,qab->q", gam_inv, pi)
    newton = pi - h[:, None, None] * gam
    del ginv
    return SigmaGeometry(gamma=gam, eta=eta, second_form=pi,
                         mean_curvature=h, newton=newton)


def sigma_mean_curvature(metric: MetricField, pts) -> np.ndarray:
    return sigma_geometry(metric, pts).mean_curvature


def pair_newton(geom: SigmaGeometry, x_vec: np.ndarray,
                theta_vec: np.ndarray) -> np.ndarray:
    """J(X, theta) for ambient vectors tangent to Sigma (last slot ignored)."""
    xa = x_vec[:, :-1]
    ta = theta_vec[:, :-1]
    return np.einsum("qab,qa,qb->q", geom.newton, xa, ta)
