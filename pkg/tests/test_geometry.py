import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steklov_bounds.geometry import (InvalidDomainError, StarDomain,
                                     SurfaceMetric, WarpDomainError,
                                     WarpFunction, boundary_frame,
                                     domain_constants, frame_arrays,
                                     validate_warp)

from oracles import brute_force_max


# ---------------------------------------------------------------------------
# warp validation


def test_plane_is_admissible():
    assert validate_warp(WarpFunction.plane(), 2.0) == []


def test_sphere_admissible_to_equator():
    assert validate_warp(WarpFunction.sphere(), math.pi / 2) == []


def test_sphere_invalid_past_equator():
    warp = WarpFunction.sphere(domain_max=3.0)
    problems = validate_warp(warp, 2.5)
    assert any("non-decreasing" in p for p in problems)


def test_tanh_admissible():
    assert validate_warp(WarpFunction.tanh(), 5.0) == []


def test_r_max_beyond_domain_is_distinct_error():
    with pytest.raises(WarpDomainError):
        validate_warp(WarpFunction.sphere(), 2.0)


def test_sample_count_floor():
    with pytest.raises(ValueError):
        validate_warp(WarpFunction.plane(), 1.0, samples=32)


def test_spline_warp_roundtrip():
    # tabulated sine warp passes the sampled admissibility checks
    knots = np.linspace(0.0, math.pi / 2, 64)
    warp = WarpFunction.from_table(knots, np.sin(knots))
    assert validate_warp(warp, math.pi / 2) == []
    r = np.linspace(0.05, 1.5, 50)
    assert np.abs(warp.h(r) - np.sin(r)).max() < 1e-7
    assert np.abs(warp.dh(r) - np.cos(r)).max() < 1e-5


def test_spline_warp_detects_bad_origin():
    knots = np.linspace(0.0, 1.0, 32)
    warp = WarpFunction.from_table(knots, knots + 0.05)
    assert any("h(0)" in p for p in validate_warp(warp, 1.0))


# ---------------------------------------------------------------------------
# surface metric


@pytest.mark.parametrize("factory", [SurfaceMetric.plane, SurfaceMetric.sphere,
                                     SurfaceMetric.tanh,
                                     SurfaceMetric.paraboloid])
def test_metric_coefficients_positive_and_flat_at_pole(factory):
    surface = factory()
    r = np.linspace(1e-4, 1.2, 200)
    assert np.all(surface.a_coef(r) > 0)
    assert np.all(surface.b_coef(r) > 0)
    small = np.array([1e-5, 1e-6, 1e-7])
    assert np.abs(surface.b_coef(small) / small ** 2 - 1.0).max() < 1e-8


def test_paraboloid_metric_values():
    surface = SurfaceMetric.paraboloid()
    assert surface.a_coef(0.5) == pytest.approx(2.0)
    assert surface.b_coef(0.5) == pytest.approx(0.25)
    assert surface.da_coef(0.5) == pytest.approx(4.0)
    assert surface.db_coef(0.5) == pytest.approx(1.0)
    # S = r / sqrt(1 + 4 r^2), S' = (1 + 4 r^2)^{-3/2}
    assert surface.s_coef(0.5) == pytest.approx(0.5 / math.sqrt(2.0))
    assert surface.ds_coef(0.5) == pytest.approx(2.0 ** -1.5)


def test_warped_s_equals_h():
    surface = SurfaceMetric.sphere()
    r = np.linspace(0.1, 1.4, 30)
    assert np.allclose(surface.s_coef(r), np.sin(r))
    assert np.allclose(surface.ds_coef(r), np.cos(r))


# ---------------------------------------------------------------------------
# star domains


def test_radius_and_derivative():
    dom = StarDomain([1.0, 0.0, 0.2], [0.1])
    theta = np.linspace(0, 2 * math.pi, 64)
    expect = 1.0 + 0.2 * np.cos(2 * theta) + 0.1 * np.sin(theta)
    assert np.allclose(dom.radius(theta), expect)
    expect_p = -0.4 * np.sin(2 * theta) + 0.1 * np.cos(theta)
    assert np.allclose(dom.dradius(theta), expect_p)


def test_positivity_enforced():
    with pytest.raises(InvalidDomainError):
        StarDomain([1.0, 1.5])


def test_rotation_preserves_curve():
    dom = StarDomain([1.0, 0.0, 0.2], [0.05, 0.1])
    rot = dom.rotated(0.7)
    theta = np.linspace(0, 2 * math.pi, 97)
    assert np.allclose(rot.radius(theta), dom.radius(theta - 0.7), atol=1e-14)


# ---------------------------------------------------------------------------
# boundary frames


def test_unit_circle_frame(plane):
    frame = boundary_frame(plane, StarDomain.constant(1.0), 0.3)
    assert frame.ds_dtheta == pytest.approx(1.0, abs=1e-14)
    assert frame.cos_angle == pytest.approx(1.0, abs=1e-14)
    assert (frame.n_r, frame.n_theta) == pytest.approx((1.0, 0.0), abs=1e-14)


def test_constant_paraboloid_frame(paraboloid):
    r0 = 0.8
    frame = boundary_frame(paraboloid, StarDomain.constant(r0), 1.1)
    assert frame.ds_dtheta == pytest.approx(r0, abs=1e-14)
    assert frame.tan2_angle == pytest.approx(0.0, abs=1e-14)


def test_perturbed_frame_at_quarter_turn(plane, pert_domain):
    # R(pi/4) = 1, R'(pi/4) = -0.4, so tan^2 = 0.16; cross-checked with a
    # finite difference of R below
    frame = boundary_frame(plane, pert_domain, math.pi / 4)
    assert frame.radius == pytest.approx(1.0, abs=1e-14)
    assert frame.dradius == pytest.approx(-0.4, abs=1e-14)
    assert frame.tan2_angle == pytest.approx(0.16, abs=1e-13)
    delta = 1e-6
    fd = (pert_domain.radius(math.pi / 4 + delta)
          - pert_domain.radius(math.pi / 4 - delta)) / (2 * delta)
    assert frame.dradius == pytest.approx(fd, abs=1e-8)


@pytest.mark.parametrize("surface_name", ["plane", "sphere", "paraboloid"])
def test_normal_has_unit_length(surface_name, request, pert_domain):
    surface = request.getfixturevalue(
        surface_name if surface_name != "plane" else "plane")
    thetas = np.linspace(0.0, 2 * math.pi, 113)
    r, _, _, cosang, _, n_r, n_theta = frame_arrays(surface, pert_domain,
                                                    thetas)
    length = surface.a_coef(r) * n_r ** 2 + surface.b_coef(r) * n_theta ** 2
    assert np.abs(length - 1.0).max() < 1e-12
    assert np.all(cosang > 0.0) and np.all(cosang <= 1.0)


def test_arc_element_definition(sphere, pert_domain):
    thetas = np.linspace(0.0, 2 * math.pi, 55)
    r, rp, ds = frame_arrays(sphere, pert_domain, thetas)[:3]
    expect = np.sqrt(sphere.a_coef(r) * rp ** 2 + sphere.b_coef(r))
    assert np.allclose(ds, expect, atol=1e-14)


def test_arc_element_floor_for_builtins(plane, sphere, pert_domain):
    # A R'^2 >= 0 and B is increasing for the builtin surfaces
    for surface in (plane, sphere):
        consts = domain_constants(surface, pert_domain)
        thetas = np.linspace(0.0, 2 * math.pi, 513)
        ds = frame_arrays(surface, pert_domain, thetas)[2]
        floor = math.sqrt(float(surface.b_coef(consts.r_min)))
        assert np.all(ds >= floor - 1e-12)


# ---------------------------------------------------------------------------
# domain constants


def test_constant_domain_constants(sphere):
    consts = domain_constants(sphere, StarDomain.constant(0.7))
    assert consts.r_min == pytest.approx(0.7, abs=1e-12)
    assert consts.r_max == pytest.approx(0.7, abs=1e-12)
    assert consts.a == 0.0 and consts.alpha == 0.0


def test_perturbed_disc_constants(plane, pert_domain):
    consts = domain_constants(plane, pert_domain)
    assert consts.r_min == pytest.approx(0.8, abs=1e-10)
    assert consts.r_max == pytest.approx(1.2, abs=1e-10)
    # closed form: max of (R'/R)^2 for R = 1 + c cos(m theta) is
    # m^2 c^2 / (1 - c^2), attained at cos(m theta) = -c
    assert consts.a == pytest.approx(1.0 / 6.0, abs=1e-10)
    # independent dense-grid oracle
    oracle = brute_force_max(
        lambda t: (0.4 * np.sin(2 * t)) ** 2 / (1 + 0.2 * np.cos(2 * t)) ** 2)
    assert consts.a == pytest.approx(oracle, abs=1e-8)
    assert consts.alpha == pytest.approx(math.atan(math.sqrt(consts.a)))


def test_paraboloid_constants_against_oracle(paraboloid):
    dom = StarDomain([1.0, 0.0, 0.0, 0.1])
    consts = domain_constants(paraboloid, dom)

    def steepness(t):
        r = 1 + 0.1 * np.cos(3 * t)
        rp = -0.3 * np.sin(3 * t)
        return (1 + 4 * r ** 2) * (rp / r) ** 2

    assert consts.a == pytest.approx(brute_force_max(steepness), abs=1e-8)
    assert consts.a == pytest.approx(0.4501809426498481, abs=1e-10)


@settings(max_examples=20, deadline=None)
@given(phase=st.floats(-math.pi, math.pi))
def test_constants_rotation_invariant(phase):
    plane = SurfaceMetric.plane()
    dom = StarDomain([1.0, 0.0, 0.2], [0.05])
    base = domain_constants(plane, dom)
    rot = domain_constants(plane, dom.rotated(phase))
    assert rot.r_min == pytest.approx(base.r_min, abs=1e-10)
    assert rot.r_max == pytest.approx(base.r_max, abs=1e-10)
    assert rot.a == pytest.approx(base.a, abs=1e-10)


@settings(max_examples=20, deadline=None)
@given(scale=st.floats(0.2, 5.0))
def test_plane_scaling_covariance(scale):
    plane = SurfaceMetric.plane()
    dom = StarDomain([1.0, 0.0, 0.2])
    base = domain_constants(plane, dom)
    scaled = domain_constants(plane, dom.scaled(scale))
    assert scaled.r_min == pytest.approx(scale * base.r_min, rel=1e-10)
    assert scaled.r_max == pytest.approx(scale * base.r_max, rel=1e-10)
    # tan^2 = R'^2/R^2 is scale-free
    assert scaled.a == pytest.approx(base.a, abs=1e-10)


def test_grid_floor_enforced(plane, pert_domain):
    with pytest.raises(ValueError):
        domain_constants(plane, pert_domain, grid=512)
