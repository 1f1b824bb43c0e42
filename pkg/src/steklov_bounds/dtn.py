"""Steklov spectra of star-shaped domains via a harmonic Galerkin basis.

The trial space is spanned by globally harmonic separated solutions
1, g_k(r) cos(k theta), g_k(r) sin(k theta); for harmonic f the Dirichlet
energy reduces to the boundary integral of f times its normal
derivative, so the Rayleigh quotient becomes a generalized eigenproblem
between two boundary matrices assembled with the trapezoidal rule on a
uniform angular grid. The angular resolution K doubles until the
requested eigenvalues stabilize. Computed values approach the true
spectrum from above as the trial space grows.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import WarpDomainError, frame_arrays, domain_constants, validate_warp
from .numerics import periodic_nodes, sym_geig
from .radial import _integrate_modes, _profile_grid, _profiles_from_trajectory

__all__ = [
    "HarmonicBasis",
    "DomainSpectrum",
    "assemble_boundary_matrices",
    "assembly_asymmetry",
    "steklov_spectrum",
]


class HarmonicBasis:
    """Harmonic trial functions 1, g_k cos(k theta), g_k sin(k theta), k <= K.

    Radial factors are normalized to g_k(r_max) = 1 and shared across
    the basis; building modes 1..K takes a single adaptive integration.
    """

    def __init__(self, surface, profiles):
        self.surface = surface
        self.profiles = list(profiles)
        for j, p in enumerate(self.profiles, start=1):
            if p.k != j:
                raise ValueError("profiles must cover k = 1..K in order")

    @property
    def max_mode(self):
        return len(self.profiles)

    @property
    def size(self):
        return 2 * len(self.profiles) + 1

    @property
    def r_max(self):
        return self.profiles[0].r_max

    @classmethod
    def build(cls, surface, max_mode, r_max, rtol=1e-11, grid_size=1024):
        ks = list(range(1, max_mode + 1))
        grid = _profile_grid(r_max, grid_size)
        traj, _ = _integrate_modes(surface, ks, r_max, rtol)
        return cls(surface, _profiles_from_trajectory(surface, ks, grid, traj))

    def extended(self, max_mode, rtol=1e-11):
        """Basis enlarged to `max_mode`, reusing the existing profiles."""
        if max_mode <= self.max_mode:
            return self
        ks = list(range(self.max_mode + 1, max_mode + 1))
        grid = self.profiles[0].grid
        traj, _ = _integrate_modes(self.surface, ks, self.r_max, rtol)
        new = _profiles_from_trajectory(self.surface, ks, grid, traj)
        return HarmonicBasis(self.surface, self.profiles + new)

    def boundary_values(self, radii):
        """g_k and w_k at the boundary radii; arrays of shape (K, len(radii))."""
        radii = np.asarray(radii, dtype=float)
        g = np.empty((self.max_mode, radii.size))
        w = np.empty((self.max_mode, radii.size))
        for j, p in enumerate(self.profiles):
            g[j] = p.g_at(radii)
            w[j] = p.w_at(radii)
        return g, w


def _assemble_raw(surface, domain, basis, quad_points):
    kk = basis.max_mode
    if quad_points < 4 * kk + 16:
        raise ValueError(
            f"need at least 4K+16 = {4 * kk + 16} quadrature nodes, got {quad_points}")
    thetas = periodic_nodes(quad_points)
    radii, _, ds, _, _, n_r, n_theta = frame_arrays(surface, domain, thetas)

    g, w = basis.boundary_values(radii)          # (K, M)
    modes = np.arange(1, kk + 1)[:, None]
    cos_t = np.cos(modes * thetas[None, :])
    sin_t = np.sin(modes * thetas[None, :])

    size = 2 * kk + 1
    phi = np.empty((size, quad_points))
    dnu = np.zeros((size, quad_points))
    phi[0] = 1.0
    phi[1::2] = g * cos_t
    phi[2::2] = g * sin_t
    # normal derivative: n_r * (w g T) + n_theta * (g T'),
    # with T' = -k sin for cos modes and +k cos for sin modes
    dnu[1::2] = n_r * (w * g * cos_t) + n_theta * (g * (-modes * sin_t))
    dnu[2::2] = n_r * (w * g * sin_t) + n_theta * (g * (modes * cos_t))

    weights = ds * (2.0 * np.pi / quad_points)
    m_mat = (phi * weights) @ phi.T
    k_raw = (dnu * weights) @ phi.T
    return k_raw, 0.5 * (m_mat + m_mat.T)


def assemble_boundary_matrices(surface, domain, basis, quad_points):
    """Boundary stiffness and mass matrices of the harmonic basis.

    M[i, j] integrates phi_i phi_j over the boundary, K[i, j] integrates
    (d_nu phi_i) phi_j; K is symmetrized after assembly (it is symmetric
    in exact arithmetic because the basis is harmonic).
    """
    k_raw, m_mat = _assemble_raw(surface, domain, basis, quad_points)
    k_mat = 0.5 * (k_raw + k_raw.T)
    # the constant mode's row and column vanish identically: the normal
    # derivative of phi_0 is zero and the flux of a harmonic function
    # through the whole boundary is zero
    k_mat[0, :] = 0.0
    k_mat[:, 0] = 0.0
    return k_mat, m_mat


def assembly_asymmetry(surface, domain, basis, quad_points):
    """Relative asymmetry of the raw stiffness matrix (quadrature diagnostic)."""
    k_raw, _ = _assemble_raw(surface, domain, basis, quad_points)
    denom = np.abs(k_raw).max()
    if denom == 0.0:
        return 0.0
    return float(np.abs(k_raw - k_raw.T).max() / denom)


@dataclass(frozen=True)
class DomainSpectrum:
    """Computed Steklov eigenvalues with convergence metadata."""

    eigenvalues: np.ndarray
    max_mode: int
    quad_points: int
    regularization_drop: int
    converged: bool
    est_error: float

    def mu(self, l):
        if l < 1 or l > self.eigenvalues.size:
            raise IndexError(
                f"eigenvalue index {l} outside 1..{self.eigenvalues.size}")
        return float(self.eigenvalues[l - 1])


def steklov_spectrum(surface, domain, l_max, k_init=16, k_cap=512, tol=1e-8,
                     gram_drop=1e-12, quad_min=256, rtol=1e-11,
                     grid_size=1024):
    """First l_max Steklov eigenvalues of the star-shaped domain.

    Doubles the angular cutoff K from k_init until the first l_max
    eigenvalues change by less than tol*(1 + |mu|) between rounds or
    k_cap is reached (converged=False then, never silently). est_error
    is the largest eigenvalue change seen in the final comparison.
    Identical inputs give bit-identical results.
    """
    if l_max < 2:
        raise ValueError("l_max must be >= 2")
    if k_init < 1 or k_cap < k_init:
        raise ValueError("need 1 <= k_init <= k_cap")

    consts = domain_constants(surface, domain)
    r_max = consts.r_max
    if surface.is_warped:
        if r_max > surface.usable_max * (1.0 + 1e-12):
            raise WarpDomainError(
                f"domain reaches {r_max}, beyond warp domain_max {surface.usable_max}")
        problems = validate_warp(surface.warp, r_max)
        if problems:
            raise ValueError("warp inadmissible on the domain: " + "; ".join(problems))

    basis = None
    prev = None
    est_error = math.inf
    kk = k_init
    while True:
        if basis is None:
            basis = HarmonicBasis.build(surface, kk, r_max, rtol=rtol,
                                        grid_size=grid_size)
        else:
            basis = basis.extended(kk, rtol=rtol)
        quad_points = max(4 * kk + 16, quad_min)
        k_mat, m_mat = assemble_boundary_matrices(surface, domain, basis,
                                                  quad_points)
        geig = sym_geig(k_mat, m_mat, gram_drop)
        if geig.eigenvalues.size >= l_max:
            evals = geig.eigenvalues[:l_max].copy()
            if prev is not None:
                delta = np.abs(evals - prev)
                est_error = float(delta.max())
                if np.all(delta < tol * (1.0 + np.abs(evals))):
                    return DomainSpectrum(evals, kk, quad_points,
                                          geig.dropped, True, est_error)
            prev = evals
        if kk >= k_cap:
            if prev is None:
                raise RuntimeError(
                    f"fewer than {l_max} eigenvalues retained even at k_cap={k_cap}")
            return DomainSpectrum(prev, kk, quad_points, geig.dropped,
                                  False, est_error)
        kk = min(2 * kk, k_cap)
