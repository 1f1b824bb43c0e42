"""Radial factors of separated harmonic modes and coordinate-ball spectra.

A harmonic function g_k(r) T(k theta) on a surface A dr^2 + B dtheta^2
has radial factor solving (S g')' = k^2 g / S with S = sqrt(B/A); on a
warped n-dimensional ball the equation is
(h^{n-1} g')' = lam_k h^{n-3} g with lam_k = k (k + n - 2).

Everything is integrated in log-derivative (Riccati) form: with
w = g'/g the equation becomes w' = -w^2 - (S'/S) w + k^2/S^2, shot from
eps = 1e-6 * min(r_end, 1) with the singular initialization
w(eps) = k/eps. Internally the scaled state v = r w is propagated, which
keeps error weights uniform along the k/r envelope; the initialization
error contracts like (eps/r)^{2k+n-2}, which the eps-halving test in the
suite verifies. Steklov eigenvalues of the ball r < R follow as
sigma_k = w_k(R)/sqrt(A(R)) with the multiplicity of degree-k spherical
harmonics.
"""

import math

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .numerics import ode_solve
from .geometry import WarpDomainError

__all__ = [
    "ProfileRangeError",
    "RadialProfile",
    "BallSpectrum",
    "radial_log_derivative",
    "radial_profile",
    "ball_spectrum",
    "mode_multiplicity",
    "angular_eigenvalue",
]

_START_FACTOR = 1e-6


class ProfileRangeError(ValueError):
    """Evaluation radius outside the range a profile was built on."""


def angular_eigenvalue(k, n):
    """Eigenvalue lam_k = k (k + n - 2) of the (n-1)-sphere Laplacian."""
    return float(k * (k + n - 2))


def mode_multiplicity(k, n):
    """Dimension of the degree-k spherical harmonics on S^{n-1}."""
    if k == 0:
        return 1
    num = (2 * k + n - 2) * math.factorial(k + n - 3)
    den = math.factorial(k) * math.factorial(n - 2)
    assert num % den == 0
    return num // den


def _check_mode_args(surface, k, n, rtol):
    if k < 1:
        raise ValueError("angular mode k must be >= 1")
    if n < 2:
        raise ValueError("dimension n must be >= 2")
    if not surface.is_warped and n != 2:
        raise ValueError("paraboloid spectra are only defined for n = 2")
    if not 1e-13 <= rtol <= 1e-6:
        raise ValueError(f"rtol {rtol} outside [1e-13, 1e-6]")


def _mode_rhs(surface, ks, n):
    """Right-hand side for y = [v_1..v_K, lg_1..lg_K], v = r * g'/g."""
    lam = np.array([angular_eigenvalue(k, n) for k in ks])
    if surface.is_warped:
        warp = surface.warp

        def rhs(r, y):
            v = y[:lam.size]
            h = float(warp.h(r))
            coef = (n - 1.0) * float(warp.dh(r)) / h
            dv = (v - v * v) / r - coef * v + lam * (r / (h * h))
            return np.concatenate((dv, v / r))
    else:

        def rhs(r, y):
            v = y[:lam.size]
            one4r2 = 1.0 + 4.0 * r * r
            dv = (v - v * v) / r - v / (r * one4r2) + lam * (one4r2 / r)
            return np.concatenate((dv, v / r))

    return rhs


def _integrate_modes(surface, ks, r_end, rtol, n=2, start_factor=None):
    """Shoot all modes in `ks` from eps to r_end in one adaptive pass."""
    if surface.is_warped and r_end > surface.usable_max * (1.0 + 1e-12):
        raise WarpDomainError(
            f"radius {r_end} exceeds warp domain_max {surface.usable_max}")
    ks = np.asarray(ks, dtype=int)
    eps = (start_factor or _START_FACTOR) * min(r_end, 1.0)
    y0 = np.concatenate((ks.astype(float), np.zeros(ks.size)))
    atol = np.concatenate((1e-13 * ks.astype(float), np.full(ks.size, 1e-13)))
    # cap steps so the dense cubic Hermite stays below the integration error
    traj = ode_solve(_mode_rhs(surface, ks, n), eps, r_end, y0,
                     rtol=rtol, atol=atol, max_step=r_end / 512.0)
    if traj.y[:, :ks.size].min() <= 0.0:
        raise ValueError("log-derivative left (0, inf); surface data invalid")
    return traj, eps


def _w_prime(surface, k, n, r, w):
    """w' from the log-derivative equation itself, for exact Hermite data."""
    lam = angular_eigenvalue(k, n)
    if surface.is_warped:
        h = surface.warp.h(r)
        coef = (n - 1.0) * surface.warp.dh(r) / h
        return -w * w - coef * w + lam / (h * h)
    s = surface.s_coef(r)
    return -w * w - surface.ds_coef(r) / s * w + lam / (s * s)


class RadialProfile:
    """Radial mode data on a grid: log g_k (normalized to 0 at r_max) and w.

    Evaluation between grid points uses cubic Hermite interpolation with
    the exact nodal derivatives (d log_g/dr = w, and w' straight from
    the log-derivative equation), so interpolated values carry the same
    monotone structure as the data at fourth-order accuracy.
    """

    def __init__(self, surface, k, grid, log_g, w, n=2):
        self.surface = surface
        self.k = int(k)
        self.n = int(n)
        self.grid = np.asarray(grid, dtype=float)
        self.log_g = np.asarray(log_g, dtype=float)
        self.w = np.asarray(w, dtype=float)
        self._log_g_ip = None
        self._w_ip = None

    @property
    def r_max(self):
        return float(self.grid[-1])

    def _clamped(self, r):
        r = np.asarray(r, dtype=float)
        lo, hi = self.grid[0], self.grid[-1]
        slack = 1e-8 * hi
        if np.any(r < lo - slack) or np.any(r > hi + slack):
            raise ProfileRangeError(
                f"radius outside profile range [{lo:.3e}, {hi:.3e}]")
        return np.clip(r, lo, hi)

    def log_g_at(self, r):
        if self._log_g_ip is None:
            self._log_g_ip = CubicHermiteSpline(self.grid, self.log_g, self.w)
        return self._log_g_ip(self._clamped(r))

    def g_at(self, r):
        return np.exp(self.log_g_at(r))

    def w_at(self, r):
        if self.k == 0:
            return np.zeros_like(np.asarray(r, dtype=float))
        if self._w_ip is None:
            dw = _w_prime(self.surface, self.k, self.n, self.grid, self.w)
            self._w_ip = CubicHermiteSpline(self.grid, self.w, dw)
        return self._w_ip(self._clamped(r))


def _profile_grid(r_max, grid_size):
    eps = _START_FACTOR * min(r_max, 1.0)
    n_geo = grid_size // 2
    geo = np.geomspace(eps, 0.1 * r_max, n_geo, endpoint=False)
    uni = np.linspace(0.1 * r_max, r_max, grid_size - n_geo)
    return np.concatenate((geo, uni))


def _profiles_from_trajectory(surface, ks, grid, traj):
    samples = traj.sample(grid)                      # (len(grid), 2K)
    nk = len(ks)
    profiles = []
    for j, k in enumerate(ks):
        v = samples[:, j]
        lg = samples[:, nk + j]
        profiles.append(RadialProfile(surface, k, grid,
                                      lg - lg[-1], v / grid))
    return profiles


def radial_log_derivative(surface, k, r_end, n=2, rtol=1e-11):
    """w_k(r_end) = g_k'(r_end)/g_k(r_end) for the harmonic radial factor."""
    _check_mode_args(surface, k, n, rtol)
    traj, _ = _integrate_modes(surface, [k], r_end, rtol, n)
    return float(traj.y_end[0] / r_end)


def radial_profile(surface, k, r_max, grid_size=512, rtol=1e-11):
    """RadialProfile of mode k on (0, r_max], normalized so g(r_max) = 1."""
    if grid_size < 64:
        raise ValueError("need grid_size >= 64")
    grid = _profile_grid(r_max, grid_size)
    if k == 0:
        zeros = np.zeros_like(grid)
        return RadialProfile(surface, 0, grid, zeros, zeros)
    _check_mode_args(surface, k, n=2, rtol=rtol)
    traj, _ = _integrate_modes(surface, [k], r_max, rtol)
    return _profiles_from_trajectory(surface, [k], grid, traj)[0]


class BallSpectrum:
    """Sorted Steklov eigenvalues of the coordinate ball r < R.

    Index convention is 1-based with mu(1) = 0 (the constant mode); each
    sigma_k enters with the multiplicity of degree-k spherical harmonics.
    """

    def __init__(self, surface, radius, n, eigenvalues):
        self.surface = surface
        self.radius = float(radius)
        self.n = int(n)
        self.eigenvalues = np.asarray(eigenvalues, dtype=float)

    def mu(self, l):
        if l < 1 or l > self.eigenvalues.size:
            raise IndexError(
                f"eigenvalue index {l} outside 1..{self.eigenvalues.size}")
        return float(self.eigenvalues[l - 1])

    def __len__(self):
        return self.eigenvalues.size


def ball_spectrum(surface, radius, count, n=2, rtol=1e-11):
    """First `count` Steklov eigenvalues of the ball r < radius.

    sigma_k = w_k(radius)/sqrt(A(radius)) for k >= 1, each repeated
    mode_multiplicity(k, n) times, preceded by the zero of the constant
    mode.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if radius <= 0:
        raise ValueError("radius must be positive")
    _check_mode_args(surface, 1, n, rtol)

    ks, total = [], 1
    k = 1
    while total < count:
        ks.append(k)
        total += mode_multiplicity(k, n)
        k += 1

    eigs = [0.0]
    if ks:
        traj, _ = _integrate_modes(surface, ks, radius, rtol, n)
        root_a = math.sqrt(float(surface.a_coef(radius)))
        v_end = traj.y_end[:len(ks)]
        for j, kk in enumerate(ks):
            sigma = float(v_end[j]) / radius / root_a
            eigs.extend([sigma] * mode_multiplicity(kk, n))
    eigs = np.sort(np.asarray(eigs))[:count]
    return BallSpectrum(surface, radius, n, eigs)
