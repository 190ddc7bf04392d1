"""Kernel family tests: support, homogeneity, moments, delta identities.

The distributional facts (double divergence of K is a delta, divergence of
L_v is delta times v) are checked in weak form against a Gaussian test jet
with known value at the origin, so quadrature is the only error source.
"""

import math
import warnings

import numpy as np
import pytest

from conedata.errors import CheckFailure, SingularPointError
from conedata.fields import ConeSpec, GridSpec, ScalarField, VectorField
from conedata.kernels import (
    KernelProfile,
    MomentCoefficients,
    RayConfig,
    apply_S,
    apply_S_points,
    bump_source,
    cap_quadrature,
    chi_tilde,
    eval_K,
    eval_Lker,
    gaussian_test_jet,
    outgoing_check,
    solve_moment_coeffs,
    weak_delta_defect,
)

THETA = 1.2
SEC = 1.0 / math.cos(THETA)


@pytest.fixture(scope="module")
def cone():
    return ConeSpec(axis=(0.0, 0.0, 1.0), theta=THETA)


@pytest.fixture(scope="module")
def profile(cone):
    return KernelProfile(cone)


@pytest.fixture(scope="module")
def coeffs(profile):
    return solve_moment_coeffs(profile)


# ---- cap rule and profile ----------------------------------------------------


def test_profile_norm_closed_form(profile):
    ref = 2.0 * math.pi * (1.0 - 0.5 * (math.cos(0.6) + math.cos(THETA)))
    assert profile.norm == ref
    np.testing.assert_allclose(profile.norm, 2.551936543198114, rtol=1e-15)


def test_cap_quadrature_integrates_area(cone):
    dirs, wts = cap_quadrature(cone)
    assert (wts > 0).all()
    np.testing.assert_allclose(np.linalg.norm(dirs, axis=1), 1.0, rtol=0, atol=1e-14)
    area = 2.0 * math.pi * (1.0 - math.cos(THETA))
    np.testing.assert_allclose(wts.sum(), area, rtol=1e-12)


def test_profile_unit_integral_gate():
    # the constructor insists the stored rule integrates chi to 1 within
    # 1e-10; a wide transition needs more polar nodes to clear that gate
    wide = ConeSpec(axis=(0.0, 0.0, 1.0), theta=THETA, theta_inner=0.3)
    with pytest.raises(CheckFailure, match="off unit"):
        KernelProfile(wide, n_polar=24, n_azimuth=48)
    prof = KernelProfile(wide, n_polar=32, n_azimuth=48)
    assert prof.nodes.shape[0] == 32 * 48


def test_profile_rejects_tiny_rules(cone):
    with pytest.raises(ValueError, match="n_polar"):
        KernelProfile(cone, n_polar=2)
    with pytest.raises(ValueError, match="profile"):
        KernelProfile(cone, profile="spline")


# ---- moment systems ----------------------------------------------------------


def test_moment_solve_frozen_values(profile, coeffs):
    assert isinstance(coeffs, MomentCoefficients)
    np.testing.assert_allclose(
        coeffs.moments, [0.79304281, 0.17788768, 0.17788768], rtol=1e-7
    )
    expect = np.array(
        [
            [0.0, 0.0, 5.62152475],
            [0.0, -5.62152475, 0.0],
            [1.26096598, 0.0, 0.0],
        ]
    )
    np.testing.assert_allclose(coeffs.alphas, expect, rtol=1e-7, atol=1e-12)
    assert coeffs.residuals.max() <= 1e-9


def test_modulated_profile_hits_unit_moments(profile, coeffs):
    # independent of the solver's own residual report: quadrate the first
    # sphere moment of chi_tilde_k and compare with e_k
    dirs, wts = profile.nodes, profile.weights
    for k in range(1, 4):
        vals = chi_tilde(profile, coeffs, k, dirs)
        moment = (wts * vals) @ dirs
        target = np.zeros(3)
        target[k - 1] = 1.0
        np.testing.assert_allclose(moment, target, rtol=0, atol=1e-9)
    with pytest.raises(ValueError, match="1, 2 or 3"):
        chi_tilde(profile, coeffs, 0, dirs)


# ---- kernel evaluation -------------------------------------------------------


def test_scalar_kernel_closed_form_on_axis(profile):
    # on the plateau chi = 1/Z, so K(0,0,2) = e3 e3^T / (2 Z)
    val = eval_K(profile, np.array([0.0, 0.0, 2.0]))
    expect = np.zeros((3, 3))
    expect[2, 2] = 1.0 / (2.0 * profile.norm)
    np.testing.assert_allclose(val, expect, rtol=1e-14, atol=0)


def test_kernel_homogeneity_exact(profile, coeffs):
    # doubling the argument scales K by 1/2 and L by 1/4; powers of two
    # commute with rounding, so the identities hold bitwise
    rng = np.random.default_rng(2)
    pts = rng.standard_normal((80, 3)) * 2.0
    pts = pts[profile.cone.contains(pts)]
    assert pts.shape[0] > 10
    np.testing.assert_array_equal(2.0 * eval_K(profile, 2.0 * pts), eval_K(profile, pts))
    for k in (1, 2, 3):
        np.testing.assert_array_equal(
            4.0 * eval_Lker(profile, coeffs, k, 2.0 * pts),
            eval_Lker(profile, coeffs, k, pts),
        )


def test_kernel_vanishes_off_cone(profile, coeffs):
    rng = np.random.default_rng(4)
    pts = rng.standard_normal((500, 3)) * 3.0
    outside = pts[~profile.cone.contains(pts)]
    assert outside.shape[0] > 100
    assert not eval_K(profile, outside).any()
    assert not eval_Lker(profile, coeffs, 2, outside).any()


def test_kernel_singular_at_origin(profile, coeffs):
    with pytest.raises(SingularPointError, match="singular"):
        eval_K(profile, np.zeros(3))
    with pytest.raises(SingularPointError):
        eval_Lker(profile, coeffs, 1, np.array([[0.0, 0.0, 1.0], [0.0, 0.0, 0.0]]))


def test_outgoing_test_guarantees_zero(profile, cone):
    # |y| >= sec(theta)|x| forces x - y outside the cone for any cone
    # directions, so the kernel must vanish on every such pair
    x = np.array([0.2, -0.1, 1.0])
    xn = np.linalg.norm(x)
    dirs, _ = cap_quadrature(cone, 12, 16)
    for fac in (1.0, 1.3, 3.0):
        ys = dirs * (SEC * xn * fac)
        assert not eval_K(profile, x - ys).any()
        if fac > 1.0:
            assert outgoing_check(cone, x, ys).all()


def test_outgoing_constant_is_tight(profile, cone):
    # negative control: |y| barely above |x| but below sec(theta)|x| can
    # land x - y inside the cone with a nonzero kernel value
    a, u1, _ = cone.frame()
    tilt = 0.75 * THETA
    x = a.copy()
    y = 1.05 * (math.cos(tilt) * a + math.sin(tilt) * u1)
    assert np.linalg.norm(y) < SEC * np.linalg.norm(x)
    assert not outgoing_check(cone, x, y)
    assert cone.contains(x - y)
    assert np.abs(eval_K(profile, x - y)).max() > 0.0


# ---- distributional identities ----------------------------------------------


def test_weak_delta_identities_refine(profile, coeffs):
    jet = gaussian_test_jet()
    errs = [weak_delta_defect(profile, coeffs, jet, n_radial=nr) for nr in (40, 80, 160)]
    eK = [e[0] for e in errs]
    eL = [e[1] for e in errs]
    np.testing.assert_allclose(eK, [4.764e-09, 2.485e-12, 2.397e-12], rtol=1e-3)
    np.testing.assert_allclose(eL, [2.777e-10, 9.906e-14, 2.820e-14], rtol=1e-3)
    assert eK[1] < eK[0] and eL[1] < eL[0]
    assert max(eK[2], eL[2]) <= 1e-3


# ---- solution operator -------------------------------------------------------


def test_grid_route_matches_pointwise_route(profile, coeffs):
    # the compiled grid integrator (interpolating a sampled source) must
    # agree with the pure-numpy pointwise route (exact callable source) up
    # to interpolation and panel-layout differences; probing at exact grid
    # nodes keeps output sampling out of the comparison
    n = 24
    grid = GridSpec(n, 6.0)
    fc, Fc = bump_source(profile.cone, r_width=2.0)
    pts = grid.points()
    shape = (n, n, n)
    f = ScalarField(grid, fc(pts).reshape(shape, order="F"))
    F = VectorField(grid, np.stack([Fc(pts)[:, j].reshape(shape, order="F") for j in range(3)]))
    h_grid, pi_grid = apply_S(profile, coeffs, f, F, grid)

    idx = [(12, 12, 17), (11, 13, 16), (12, 11, 18), (13, 12, 15)]
    node_pts = pts.reshape((n, n, n, 3), order="F")
    probes = np.array([node_pts[a, b, d] for (a, b, d) in idx])
    assert profile.cone.contains(probes).all()
    h_pts, pi_pts = apply_S_points(profile, coeffs, fc, Fc, probes)

    scale_h = np.abs(h_pts).max()
    scale_pi = np.abs(pi_pts).max()
    comps = {(0, 0): 0, (0, 1): 1, (0, 2): 2, (1, 1): 3, (1, 2): 4, (2, 2): 5}
    for (i, j), c in comps.items():
        gh = np.array([h_grid.values[c][a, b, d] for (a, b, d) in idx])
        gp = np.array([pi_grid.values[c][a, b, d] for (a, b, d) in idx])
        np.testing.assert_allclose(gh, h_pts[:, i, j], atol=2.5e-2 * scale_h, rtol=0)
        np.testing.assert_allclose(gp, pi_pts[:, i, j], atol=2.5e-2 * scale_pi, rtol=0)

    # output outside the closed cone is an exact zero, not merely small
    outside = ~profile.cone.contains(pts).reshape(shape, order="F")
    assert not h_grid.values[:, outside].any()
    assert not pi_grid.values[:, outside].any()


def test_pointwise_route_warns_on_heavy_tail(profile, coeffs):
    def slow_f(pts):
        r2 = np.einsum("ni,ni->n", np.atleast_2d(pts), np.atleast_2d(pts))
        return 1.0 / (1.0 + r2)

    def zero_F(pts):
        return np.zeros((np.atleast_2d(pts).shape[0], 3))

    with pytest.warns(UserWarning, match="tail"):
        apply_S_points(
            profile, coeffs, slow_f, zero_F, np.array([[0.0, 0.0, 1.0]]),
            RayConfig(t_max=20.0),
        )


def test_ray_config_validation():
    with pytest.raises(ValueError, match="ray_points"):
        RayConfig(ray_points=1)
    with pytest.raises(ValueError, match="positive"):
        RayConfig(panel_len=0.0)
    with pytest.raises(ValueError, match="interpolation"):
        RayConfig(interp="spline")


def test_apply_s_rejects_mixed_sources(profile, coeffs):
    grid = GridSpec(8, 2.0)
    f = ScalarField(grid, np.zeros((8, 8, 8)))
    with pytest.raises(TypeError, match="sources"):
        apply_S(profile, coeffs, f, lambda p: None, grid)
