import math

import numpy as np
import pytest

from steklov_bounds.numerics import (GeneralizedEig, IndefiniteMassError,
                                     OdeStepError, ode_solve, periodic_nodes,
                                     periodic_quadrature, quad2d_polar,
                                     sym_geig)

TWO_PI_I0_ONE = 7.954926521012845      # 2*pi*I_0(1), 40-digit reference


# ---------------------------------------------------------------------------
# ode_solve


def test_exponential_growth():
    traj = ode_solve(lambda t, y: y, 0.0, 1.0, [1.0], rtol=1e-11)
    assert abs(traj.y_end[0] - math.e) < 10 * 1e-11


def test_exponential_decay():
    traj = ode_solve(lambda t, y: -2.0 * y, 0.0, 2.0, [3.0], rtol=1e-11)
    assert abs(traj.y_end[0] - 3.0 * math.exp(-4.0)) < 10 * 1e-11


def test_riccati_plane_mode_one():
    # w' = -w^2 - w/r + 1/r^2 with w(eps) = 1/eps has w = 1/r exactly
    def rhs(r, y):
        return np.array([-y[0] ** 2 - y[0] / r + 1.0 / r ** 2])

    traj = ode_solve(rhs, 1e-6, 1.0, [1e6], rtol=1e-11, atol=1e-13 * 1e6,
                     max_step=1e-3)
    assert abs(traj.y_end[0] - 1.0) < 10 * 1e-11


@pytest.mark.parametrize("rhs,y0,t1,exact", [
    (lambda t, y: y, 1.0, 1.0, math.e),
    (lambda t, y: -2.0 * y, 3.0, 2.0, 3.0 * math.exp(-4.0)),
])
def test_global_error_within_contract(rhs, y0, t1, exact):
    for rtol in (1e-6, 1e-9, 1e-12):
        traj = ode_solve(rhs, 0.0, t1, [y0], rtol=rtol, atol=1e-15)
        assert abs(traj.y_end[0] - exact) <= 50 * rtol


def test_tolerance_ordering():
    # tightening rtol by 100x must pay off by at least 4x twice over;
    # adaptive error is roughly proportional to rtol, so per-decade
    # gains are what can be asserted robustly
    errs = []
    for rtol in (1e-5, 1e-7, 1e-9):
        traj = ode_solve(lambda t, y: y, 0.0, 1.0, [1.0], rtol=rtol,
                         atol=1e-15)
        errs.append(abs(traj.y_end[0] - math.e))
    assert errs[1] <= errs[0] / 16.0
    assert errs[2] <= errs[1] / 16.0


def test_dense_output_matches_closed_form():
    # cubic Hermite between nodes: error ~ h^4 |y''''| / 384 = 2.6e-11
    traj = ode_solve(lambda t, y: np.array([math.cos(t)]), 0.0, 6.0, [0.0],
                     rtol=1e-11, max_step=0.01)
    ts = np.linspace(0.0, 6.0, 887)
    assert np.abs(traj.sample(ts)[:, 0] - np.sin(ts)).max() < 1e-10


def test_sample_outside_interval_rejected():
    traj = ode_solve(lambda t, y: y, 0.0, 1.0, [1.0], rtol=1e-9)
    with pytest.raises(ValueError):
        traj.sample(1.5)


def test_nonfinite_rhs_raises():
    def rhs(t, y):
        return np.array([1.0 / (t - 0.5)])

    with pytest.raises(OdeStepError):
        ode_solve(rhs, 0.0, 1.0, [0.0], rtol=1e-9)


def test_rtol_range_enforced():
    with pytest.raises(ValueError):
        ode_solve(lambda t, y: y, 0.0, 1.0, [1.0], rtol=1e-2)
    with pytest.raises(ValueError):
        ode_solve(lambda t, y: y, 0.0, 1.0, [1.0], rtol=1e-14)


# ---------------------------------------------------------------------------
# periodic quadrature


def test_constant_integrates_to_two_pi():
    assert periodic_quadrature(np.ones(16)) == pytest.approx(2 * math.pi,
                                                             abs=1e-14)


def test_cosine_squared():
    theta = periodic_nodes(16)
    assert periodic_quadrature(np.cos(theta) ** 2) == pytest.approx(
        math.pi, abs=1e-14)


def test_exp_cos_against_bessel():
    # reference via a 4096-node run and the frozen 2*pi*I_0(1)
    v64 = periodic_quadrature(np.exp(np.cos(periodic_nodes(64))))
    v4096 = periodic_quadrature(np.exp(np.cos(periodic_nodes(4096))))
    assert v64 == pytest.approx(v4096, abs=1e-13)
    assert v64 == pytest.approx(TWO_PI_I0_ONE, abs=1e-12)


@pytest.mark.parametrize("degree,m", [(3, 8), (7, 16), (31, 64), (63, 256)])
def test_trig_polynomial_exactness(degree, m):
    rng = np.random.default_rng(degree * 1000 + m)
    coeffs_c = rng.uniform(-1, 1, degree + 1)
    coeffs_s = rng.uniform(-1, 1, degree)
    theta = periodic_nodes(m)
    vals = np.full(m, coeffs_c[0])
    for k in range(1, degree + 1):
        vals = vals + coeffs_c[k] * np.cos(k * theta) \
            + coeffs_s[k - 1] * np.sin(k * theta)
    exact = 2 * math.pi * coeffs_c[0]
    err = abs(periodic_quadrature(vals) - exact)
    assert err < 1e-13 * m * np.abs(vals).max()


def test_too_few_samples_rejected():
    with pytest.raises(ValueError):
        periodic_quadrature(np.ones(4))


# ---------------------------------------------------------------------------
# 2-D polar quadrature


def test_polar_area_weight():
    assert quad2d_polar(lambda r, p: r, 1.0) == pytest.approx(math.pi,
                                                              abs=1e-13)


def test_polar_moment():
    val = quad2d_polar(lambda r, p: r ** 3 * np.cos(p) ** 2, 1.0)
    assert val == pytest.approx(math.pi / 4, abs=1e-13)


def test_mapped_domain_area_self_refines():
    # area of the planar domain R = 1 + 0.2 cos(2 theta) through the
    # rho = r R_m / R map; exact value pi*(1 + 0.02) from the Fourier series
    r_m = 0.8

    def integrand(rho, phi):
        rad = 1.0 + 0.2 * np.cos(2 * phi)
        return rho * (rad / r_m) ** 2

    base = quad2d_polar(integrand, r_m, 64, 128)
    refined = quad2d_polar(integrand, r_m, 256, 512)
    assert base == pytest.approx(refined, rel=1e-12)
    assert refined == pytest.approx(math.pi * 1.02, rel=1e-12)


def test_polar_minimum_sizes():
    with pytest.raises(ValueError):
        quad2d_polar(lambda r, p: r, 1.0, n_r=32)


# ---------------------------------------------------------------------------
# generalized symmetric eigensolver


def test_identity_mass_diagonal():
    res = sym_geig(np.diag([0.0, 1.0, 2.0]), np.eye(3), drop=0.0)
    assert np.allclose(res.eigenvalues, [0.0, 1.0, 2.0], atol=1e-14)
    assert res.dropped == 0


def test_two_by_two_analytic():
    res = sym_geig(np.array([[2.0, 1.0], [1.0, 2.0]]), np.eye(2), drop=0.0)
    assert np.allclose(res.eigenvalues, [1.0, 3.0], atol=1e-14)


def test_forced_truncation():
    res = sym_geig(np.diag([1.0, 1.0]), np.diag([1.0, 1e-16]), drop=1e-12)
    assert res.dropped == 1
    assert np.allclose(res.eigenvalues, [1.0], atol=1e-12)


def test_indefinite_mass_rejected():
    with pytest.raises(IndefiniteMassError):
        sym_geig(np.eye(2), np.diag([1.0, -1e-3]))


def test_asymmetric_input_rejected():
    bad = np.array([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        sym_geig(bad, np.eye(2))


def test_pencil_residuals():
    rng = np.random.default_rng(7)
    base = rng.standard_normal((6, 6))
    k_mat = base + base.T
    chol = rng.standard_normal((6, 6)) / math.sqrt(6)
    m_mat = chol @ chol.T + 0.5 * np.eye(6)
    res = sym_geig(k_mat, m_mat, drop=1e-12)
    assert isinstance(res, GeneralizedEig)
    norm_k = np.abs(k_mat).max()
    norm_m = np.abs(m_mat).max()
    for mu, vec in zip(res.eigenvalues, res.vectors.T):
        resid = np.abs(k_mat @ vec - mu * (m_mat @ vec)).max()
        assert resid < 1e-10 * (norm_k + abs(mu) * norm_m)


def test_determinism():
    rng = np.random.default_rng(11)
    base = rng.standard_normal((8, 8))
    k_mat = base + base.T
    m_mat = np.eye(8)
    first = sym_geig(k_mat, m_mat)
    second = sym_geig(k_mat.copy(), m_mat.copy())
    assert np.array_equal(first.eigenvalues, second.eigenvalues)
    assert np.array_equal(first.vectors, second.vectors)
