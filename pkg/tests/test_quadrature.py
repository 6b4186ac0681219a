"""Patches, measures, and sequence extrapolation against closed-form areas."""

import numpy as np
import pytest

from halfmass.charges import flat_reference, hyperbolic_reference, sphere_area
from halfmass.quadrature import (QuadratureRule, arithmetic_ladder,
                                 boundary_annulus_patch, corner_sphere_patch,
                                 estimate_limit, half_shell_patch,
                                 hemisphere_patch, integrate,
                                 integrate_chunked, integrate_values,
                                 radius_ladder, split_patch)

RULE = QuadratureRule(polar=24, azimuth=48, radial=16)


def _ones(patch):
    return np.ones(patch.points.shape[0])


@pytest.mark.parametrize("n", [3, 4])
@pytest.mark.parametrize("r", [1.0, 2.5])
def test_flat_hemisphere_area(n, r):
    ref = flat_reference(n)
    patch = hemisphere_patch(n, r, RULE)
    got = integrate_values(ref, patch, _ones(patch))
    want = 0.5 * sphere_area(n - 1) * r ** (n - 1)
    assert np.isclose(got, want, rtol=1e-10)
    assert np.all(patch.points[:, -1] >= -1e-14)
    assert np.allclose(np.linalg.norm(patch.points, axis=1), r, atol=1e-12)


@pytest.mark.parametrize("n", [3, 4])
def test_corner_sphere_measure(n):
    ref = flat_reference(n)
    r = 1.7
    patch = corner_sphere_patch(n, r, RULE)
    got = integrate_values(ref, patch, _ones(patch))
    want = sphere_area(n - 2) * r ** (n - 2)
    assert np.isclose(got, want, rtol=1e-10)
    assert np.all(patch.points[:, -1] == 0.0)


@pytest.mark.parametrize("n", [3, 4])
def test_boundary_annulus_measure(n):
    ref = flat_reference(n)
    r0, r1 = 1.0, 2.0
    patch = boundary_annulus_patch(n, r0, r1, RULE)
    got = integrate_values(ref, patch, _ones(patch))
    want = sphere_area(n - 2) * (r1 ** (n - 1) - r0 ** (n - 1)) / (n - 1)
    assert np.isclose(got, want, rtol=1e-10)


@pytest.mark.parametrize("n", [3, 4])
def test_half_shell_volume(n):
    ref = flat_reference(n)
    r0, r1 = 0.5, 1.5
    patch = half_shell_patch(n, r0, r1, RULE)
    got = integrate_values(ref, patch, _ones(patch))
    want = 0.5 * sphere_area(n - 1) * (r1 ** n - r0 ** n) / n
    assert np.isclose(got, want, rtol=1e-10)


def test_hyperbolic_sphere_and_circle_measures():
    # coordinate radius equals geodesic radius in the model chart, so the
    # closed forms for geodesic spheres apply verbatim
    n = 3
    b = hyperbolic_reference(n)
    rho = 1.3
    hemi = hemisphere_patch(n, rho, RULE)
    got = integrate_values(b, hemi, _ones(hemi))
    assert np.isclose(got, 2 * np.pi * np.sinh(rho) ** 2, rtol=1e-9)
    corner = corner_sphere_patch(n, rho, RULE)
    got_c = integrate_values(b, corner, _ones(corner))
    assert np.isclose(got_c, 2 * np.pi * np.sinh(rho), rtol=1e-9)


def test_polynomial_moments_on_the_hemisphere():
    n = 3
    ref = flat_reference(n)
    patch = hemisphere_patch(n, 1.0, RULE)
    # odd tangential moments vanish; the normal first moment is pi r^3
    x = patch.points
    assert abs(integrate_values(ref, patch, x[:, 0])) < 1e-12
    assert abs(integrate_values(ref, patch, x[:, 0] * x[:, 1])) < 1e-12
    assert np.isclose(integrate_values(ref, patch, x[:, 2]), np.pi,
                      rtol=1e-10)
    # second moments: int x_i^2 over the full sphere is (4 pi / 3) r^4
    assert np.isclose(integrate_values(ref, patch, x[:, 0] ** 2),
                      2 * np.pi / 3, rtol=1e-9)


def test_chunked_integration_matches_whole_patch():
    n = 3
    ref = flat_reference(n)
    patch = hemisphere_patch(n, 2.0, RULE)

    def fn(p):
        return np.cos(p[:, 0]) + p[:, 2] ** 2

    whole = integrate(ref, patch, fn)
    chunked = integrate_chunked(ref, patch, fn, chunk=97)
    assert np.isclose(whole, chunked, rtol=1e-13)
    sizes = [sub.points.shape[0] for sub in split_patch(patch, 97)]
    assert sum(sizes) == patch.points.shape[0]
    assert max(sizes) <= 97


def test_ladders():
    assert radius_ladder(4.0, 2.0, 4) == [4.0, 8.0, 16.0, 32.0]
    assert arithmetic_ladder(3.0, 1.5, 3) == [3.0, 4.5, 6.0]


def test_estimate_limit_geometric_power_tail():
    radii = radius_ladder(4.0, 2.0, 6)
    limit, c, p = 0.5, 3.0, 1.0
    samples = [limit + c * r ** (-p) for r in radii]
    est = estimate_limit(radii, samples)
    assert abs(est.limit - limit) < 1e-6
    assert abs(est.rate - p) < 1e-3
    assert est.converged_cleanly
    assert abs(est.limit - limit) <= 10 * max(est.error, 1e-12)


def test_estimate_limit_arithmetic_exponential_tail():
    radii = arithmetic_ladder(2.0, 1.0, 6)
    limit, c, p = -0.25, 1.7, 1.5
    samples = [limit + c * np.exp(-p * r) for r in radii]
    est = estimate_limit(radii, samples)
    assert abs(est.limit - limit) < 1e-6
    assert abs(est.rate - p) < 1e-3
    assert est.converged_cleanly


def test_estimate_limit_flags_rate_mismatch():
    radii = radius_ladder(4.0, 2.0, 6)
    samples = [1.0 + r ** (-1.0) for r in radii]
    # the threshold is strict: deviation must exceed 50% of the expectation
    est = estimate_limit(radii, samples, expected_rate=3.0)
    assert any("rate mismatch" in f for f in est.flags)
    ok = estimate_limit(radii, samples, expected_rate=1.0)
    assert ok.converged_cleanly


def test_estimate_limit_flags_non_contracting_noise():
    radii = radius_ladder(4.0, 2.0, 6)
    samples = [1.0, 1.3, 1.0, 1.3, 1.0, 1.3]
    est = estimate_limit(radii, samples)
    assert any("non-contracting" in f for f in est.flags)


def test_estimate_limit_noise_floor_silences_roundoff_sequences():
    radii = radius_ladder(4.0, 2.0, 6)
    samples = [1e-15, -1e-15, 1e-15, -1e-15, 1e-15, -1e-15]
    noisy = estimate_limit(radii, samples)
    assert not noisy.converged_cleanly
    floored = estimate_limit(radii, samples, noise_floor=1e-11)
    assert floored.converged_cleanly
    assert abs(floored.limit) <= 1e-11
    assert floored.error <= 1e-11


def test_estimate_limit_constant_sequence_is_clean():
    radii = radius_ladder(4.0, 2.0, 5)
    est = estimate_limit(radii, [0.75] * 5)
    assert est.converged_cleanly
    assert est.limit == 0.75 and est.error == 0.0
