"""Steklov spectra of star-shaped domains on surfaces of revolution.

Computes Dirichlet-to-Neumann (Steklov) eigenvalues of radial-graph
domains on warped metrics dr^2 + h(r)^2 dtheta^2 and on the paraboloid,
evaluates sharp eigenvalue lower bounds relative to the inscribed
coordinate ball, and verifies the inequalities, their equality cases,
and the underlying integral estimates numerically.
"""

__version__ = "0.1.0"

from .geometry import (WarpFunction, SurfaceMetric, StarDomain, BoundaryFrame,
                       DomainConstants, validate_warp, boundary_frame,
                       domain_constants)
from .radial import (RadialProfile, BallSpectrum, radial_log_derivative,
                     radial_profile, ball_spectrum)
from .dtn import (HarmonicBasis, DomainSpectrum, assemble_boundary_matrices,
                  steklov_spectrum)
from .bounds import (BoundFormula, BoundValue, shape_factor, bound_main_warped,
                     bound_paraboloid, bound_kuttler_sigillito,
                     bound_garcia_montano, bound_sphere_mu2,
                     bound_bramble_payne)
from .verify import (VerificationCase, BoundReport, verify_case,
                     sharpness_study, proof_step_check, PolarTestFunction,
                     random_test_functions, random_domain_suite)

__all__ = [
    "WarpFunction", "SurfaceMetric", "StarDomain", "BoundaryFrame",
    "DomainConstants", "validate_warp", "boundary_frame", "domain_constants",
    "RadialProfile", "BallSpectrum", "radial_log_derivative", "radial_profile",
    "ball_spectrum",
    "HarmonicBasis", "DomainSpectrum", "assemble_boundary_matrices",
    "steklov_spectrum",
    "BoundFormula", "BoundValue", "shape_factor", "bound_main_warped",
    "bound_paraboloid", "bound_kuttler_sigillito", "bound_garcia_montano",
    "bound_sphere_mu2", "bound_bramble_payne",
    "VerificationCase", "BoundReport", "verify_case", "sharpness_study",
    "proof_step_check", "PolarTestFunction", "random_test_functions",
    "random_domain_suite",
]
