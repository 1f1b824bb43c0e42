"""Verification harness for the eigenvalue lower bounds.

Checks every bound formula against numerically computed spectra, tracks
the bound/eigenvalue ratio under ball-degenerating families, and tests
the two integral estimates behind the main bounds (the gradient-energy
comparison between the domain and its inscribed ball, and the boundary
mass comparison) together with their quotient form, on explicit test
functions pulled back through rho = r * R_m / R(theta).

A bound "violation" that is within the combined numerical slack
(relative rel_slack plus the solver's est_error) is reported as
marginal, not failed; a non-converged solve leaves pass undefined.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import StarDomain, InvalidDomainError, domain_constants, \
    frame_arrays
from .numerics import periodic_nodes, periodic_quadrature, quad2d_polar
from .radial import ball_spectrum
from .dtn import steklov_spectrum
from .bounds import (BoundFormula, bound_main_warped, bound_paraboloid,
                     bound_sphere_mu2, bound_garcia_montano,
                     bound_kuttler_sigillito, bound_bramble_payne)

__all__ = [
    "QuadratureResolutionError",
    "VerificationCase",
    "BoundEntry",
    "BoundReport",
    "verify_case",
    "SharpnessResult",
    "sharpness_study",
    "PolarTestFunction",
    "random_test_functions",
    "ProofStepReport",
    "proof_step_check",
    "DomainSuite",
    "random_domain_suite",
]


class QuadratureResolutionError(RuntimeError):
    """Quadrature refinement disagreed; the check is unresolved, not failed."""


# ---------------------------------------------------------------------------
# bound verification


@dataclass(frozen=True)
class VerificationCase:
    """One domain with the formulas and eigenvalue indices to check."""

    surface: object
    domain: StarDomain
    l_values: tuple
    formulas: tuple
    rel_slack: float = 1e-6
    solver_opts: dict = field(default_factory=dict)

    def __post_init__(self):
        for formula in self.formulas:
            if not formula.applies_to(self.surface):
                raise ValueError(
                    f"{formula.value} does not apply to surface "
                    f"{self.surface.label}")
        if min(self.l_values) < 1:
            raise ValueError("eigenvalue indices are 1-based")


@dataclass(frozen=True)
class BoundEntry:
    """Result for one (formula, l) pair.

    status is one of 'pass' (bound <= mu), 'marginal' (holds only within
    the numerical slack), 'fail', or 'undefined' (solver did not
    converge). `passed` follows the slack criterion and is None when
    undefined.
    """

    formula: BoundFormula
    l: int
    mu: float
    bound: float
    ratio: float | None
    passed: bool | None
    status: str
    est_error: float


class BoundReport:
    """Bound entries for one verification case plus solver metadata."""

    def __init__(self, case, spectrum, constants, entries):
        self.case = case
        self.spectrum = spectrum
        self.constants = constants
        self.entries = list(entries)

    @property
    def counts(self):
        out = {"pass": 0, "marginal": 0, "fail": 0, "undefined": 0}
        for e in self.entries:
            out[e.status] += 1
        return out

    @property
    def all_passed(self):
        return all(e.passed for e in self.entries)

    def to_dict(self):
        return {
            "surface": self.case.surface.label,
            "domain": {
                "cos": self.case.domain.cos_coeffs.tolist(),
                "sin": self.case.domain.sin_coeffs.tolist(),
            },
            "constants": {
                "r_min": self.constants.r_min,
                "r_max": self.constants.r_max,
                "a": self.constants.a,
                "alpha": self.constants.alpha,
            },
            "solver": {
                "converged": self.spectrum.converged,
                "est_error": self.spectrum.est_error,
                "max_mode": self.spectrum.max_mode,
                "quad_points": self.spectrum.quad_points,
                "regularization_drop": self.spectrum.regularization_drop,
            },
            "entries": [
                {
                    "formula": e.formula.value,
                    "l": e.l,
                    "mu": e.mu,
                    "bound": e.bound,
                    "ratio": e.ratio,
                    "pass": e.passed,
                    "status": e.status,
                    "est_error": e.est_error,
                }
                for e in self.entries
            ],
            "counts": self.counts,
        }


def _evaluate_formula(formula, surface, domain, consts, balls, l):
    if formula is BoundFormula.MAIN_WARPED:
        return bound_main_warped(surface, consts, balls["surface"], l)
    if formula is BoundFormula.PARABOLOID_MAIN:
        return bound_paraboloid(consts, balls["surface"], l)
    if formula is BoundFormula.SPHERE_MU2:
        return bound_sphere_mu2(consts, balls["surface"])
    if formula is BoundFormula.GARCIA_MONTANO:
        return bound_garcia_montano(consts)
    if formula is BoundFormula.KUTTLER_SIGILLITO:
        return bound_kuttler_sigillito(surface, domain, max(l // 2, 1))
    if formula is BoundFormula.BRAMBLE_PAYNE:
        return bound_bramble_payne(surface, domain)
    raise ValueError(f"unknown formula {formula}")


def verify_case(case):
    """Solve the case's spectrum once and evaluate every requested bound."""
    l_max = max(case.l_values)
    spectrum = steklov_spectrum(case.surface, case.domain, max(l_max, 2),
                                **case.solver_opts)
    consts = domain_constants(case.surface, case.domain)

    balls = {}
    if any(f.needs_ball for f in case.formulas):
        balls["surface"] = ball_spectrum(case.surface, consts.r_min, l_max)

    entries = []
    for formula in case.formulas:
        for l in sorted(case.l_values):
            if formula.mu2_only and l != 2:
                continue
            if formula is BoundFormula.KUTTLER_SIGILLITO and l < 2:
                continue
            bv = _evaluate_formula(formula, case.surface, case.domain,
                                   consts, balls, l)
            mu = spectrum.mu(l)
            ratio = bv.value / mu if (l >= 2 and mu > 0.0) else None
            if not spectrum.converged:
                passed, status = None, "undefined"
            elif l == 1:
                passed = abs(bv.value) <= 1e-12
                status = "pass" if passed else "fail"
            else:
                slackline = mu * (1.0 + case.rel_slack) + spectrum.est_error
                passed = bv.value <= slackline
                if bv.value <= mu:
                    status = "pass"
                else:
                    status = "marginal" if passed else "fail"
            entries.append(BoundEntry(formula, l, mu, bv.value, ratio,
                                      passed, status, spectrum.est_error))
    return BoundReport(case, spectrum, consts, entries)


# ---------------------------------------------------------------------------
# sharpness under ball degeneration


@dataclass(frozen=True)
class SharpnessResult:
    """Ratios bound/mu_l along a shrinking perturbation family."""

    formula: BoundFormula
    l: int
    points: tuple          # ((eps, ratio), ...) in the input eps order
    extrapolated: float    # Richardson limit of the last three points at eps=0


def _extrapolate_to_zero(xs, ys):
    xs, ys = list(xs), list(ys)
    take = min(3, len(xs))
    xs, ys = xs[-take:], ys[-take:]
    # Neville's scheme evaluated at 0
    tab = list(ys)
    for level in range(1, take):
        for i in range(take - level):
            x0, x1 = xs[i], xs[i + level]
            tab[i] = (x1 * tab[i] - x0 * tab[i + 1]) / (x1 - x0)
    return float(tab[0])


def perturbed_domain(r0, profile_cos, profile_sin, eps):
    """StarDomain with R = r0 * (1 + eps * P), P the mode >= 1 profile."""
    profile_cos = np.atleast_1d(np.asarray(profile_cos, dtype=float)) \
        if len(profile_cos) else np.zeros(0)
    profile_sin = np.atleast_1d(np.asarray(profile_sin, dtype=float)) \
        if len(profile_sin) else np.zeros(0)
    cos_coeffs = np.concatenate(([r0], r0 * eps * profile_cos))
    return StarDomain(cos_coeffs, r0 * eps * profile_sin)


def sharpness_study(surface, base_r0, profile_cos, profile_sin, eps_list, l,
                    solver_opts=None):
    """Bound/eigenvalue ratios for R = r0 (1 + eps P) as eps shrinks.

    The main bound of the surface (warped or paraboloid) is used. The
    ratio tends to 1 as eps -> 0 because the family degenerates to a
    coordinate ball; the result carries the polynomial extrapolation of
    the last three points to eps = 0.
    """
    if l < 2:
        raise ValueError("sharpness ratios need l >= 2 (mu_1 = 0)")
    solver_opts = dict(solver_opts or {})
    formula = (BoundFormula.MAIN_WARPED if surface.is_warped
               else BoundFormula.PARABOLOID_MAIN)
    points = []
    for eps in eps_list:
        domain = perturbed_domain(base_r0, profile_cos, profile_sin, eps)
        spectrum = steklov_spectrum(surface, domain, max(l, 2), **solver_opts)
        consts = domain_constants(surface, domain)
        ball = ball_spectrum(surface, consts.r_min, max(l, 2))
        if formula is BoundFormula.MAIN_WARPED:
            bv = bound_main_warped(surface, consts, ball, l)
        else:
            bv = bound_paraboloid(consts, ball, l)
        points.append((float(eps), bv.value / spectrum.mu(l)))
    # the ratio is a product of factors analytic in eps, so extrapolate
    # its logarithm; Richardson/Neville on the last three points
    extrap = math.exp(_extrapolate_to_zero(
        [p[0] for p in points], [math.log(p[1]) for p in points]))
    return SharpnessResult(formula, l, tuple(points), extrap)


# ---------------------------------------------------------------------------
# proof-step integral checks


class PolarTestFunction:
    """Finite sum of (polynomial in rho) x (cos/sin of m phi) terms.

    Terms with angular mode m >= 1 must have polynomial vanishing at
    rho = 0, which keeps the gradient energy integrable at the pole.
    """

    def __init__(self, terms):
        cleaned = []
        for mode, kind, coeffs in terms:
            coeffs = np.atleast_1d(np.asarray(coeffs, dtype=float))
            if kind not in ("cos", "sin"):
                raise ValueError(f"unknown angular kind {kind!r}")
            if mode < 0 or (kind == "sin" and mode == 0):
                raise ValueError("need mode >= 0, and sin terms need mode >= 1")
            if mode >= 1 and coeffs[0] != 0.0:
                raise ValueError("mode >= 1 terms must vanish at rho = 0")
            cleaned.append((int(mode), kind, coeffs))
        if not cleaned:
            raise ValueError("need at least one term")
        self.terms = cleaned

    def _angular(self, mode, kind, phi, derivative=False):
        if not derivative:
            return np.cos(mode * phi) if kind == "cos" else np.sin(mode * phi)
        if kind == "cos":
            return -mode * np.sin(mode * phi)
        return mode * np.cos(mode * phi)

    def value(self, rho, phi):
        out = np.zeros(np.broadcast(rho, phi).shape)
        for mode, kind, coeffs in self.terms:
            out = out + np.polynomial.polynomial.polyval(rho, coeffs) \
                * self._angular(mode, kind, phi)
        return out

    def d_rho(self, rho, phi):
        out = np.zeros(np.broadcast(rho, phi).shape)
        for mode, kind, coeffs in self.terms:
            dc = np.polynomial.polynomial.polyder(coeffs)
            out = out + np.polynomial.polynomial.polyval(rho, dc) \
                * self._angular(mode, kind, phi)
        return out

    def d_phi(self, rho, phi):
        out = np.zeros(np.broadcast(rho, phi).shape)
        for mode, kind, coeffs in self.terms:
            if mode == 0:
                continue
            out = out + np.polynomial.polynomial.polyval(rho, coeffs) \
                * self._angular(mode, kind, phi, derivative=True)
        return out


def random_test_functions(count, max_mode=4, max_degree=4, seed=0):
    """Reproducible random PolarTestFunctions (coefficients in [-1, 1])."""
    rng = np.random.default_rng(seed)
    funcs = []
    for _ in range(count):
        terms = []
        for _ in range(rng.integers(1, 4)):
            mode = int(rng.integers(0, max_mode + 1))
            kind = "cos" if mode == 0 or rng.integers(0, 2) == 0 else "sin"
            degree = int(rng.integers(1, max_degree + 1))
            coeffs = rng.uniform(-1.0, 1.0, size=degree + 1)
            if mode >= 1:
                coeffs[0] = 0.0
            terms.append((mode, kind, coeffs))
        funcs.append(PolarTestFunction(terms))
    return funcs


@dataclass(frozen=True)
class ProofStepEntry:
    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool


@dataclass(frozen=True)
class ProofStepReport:
    entries: tuple

    @property
    def all_passed(self):
        return all(e.passed for e in self.entries)

    def entry(self, name):
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)


def _proof_integrals(surface, domain, f, consts, n_r, n_phi):
    """The four integrals of one proof-step check at one resolution."""
    r_m = consts.r_min

    if surface.is_warped:
        warp = surface.warp

        def ball_energy(rho, phi):
            h = warp.h(rho)
            return (f.d_rho(rho, phi) ** 2
                    + (f.d_phi(rho, phi) / h) ** 2) * h

        def domain_energy(rho, phi):
            rad = domain.radius(phi)
            drad = domain.dradius(phi)
            r = rho * rad / r_m
            h = warp.h(r)
            f_r = f.d_rho(rho, phi) * (r_m / rad)
            f_t = f.d_phi(rho, phi) - f.d_rho(rho, phi) * rho * drad / rad
            return (f_r ** 2 + (f_t / h) ** 2) * h * (rad / r_m)
    else:

        def ball_energy(rho, phi):
            one4 = 1.0 + 4.0 * rho ** 2
            return (f.d_rho(rho, phi) ** 2 / one4
                    + (f.d_phi(rho, phi) / rho) ** 2) * rho * np.sqrt(one4)

        def domain_energy(rho, phi):
            rad = domain.radius(phi)
            drad = domain.dradius(phi)
            r = rho * rad / r_m
            one4 = 1.0 + 4.0 * r ** 2
            f_r = f.d_rho(rho, phi) * (r_m / rad)
            f_t = f.d_phi(rho, phi) - f.d_rho(rho, phi) * rho * drad / rad
            return (f_r ** 2 / one4 + (f_t / r) ** 2) * r * np.sqrt(one4) \
                * (rad / r_m)

    e_ball = quad2d_polar(ball_energy, r_m, n_r, n_phi)
    e_domain = quad2d_polar(domain_energy, r_m, n_r, n_phi)

    m_boundary = 2 * n_phi
    thetas = periodic_nodes(m_boundary)
    trace = f.value(np.full(m_boundary, r_m), thetas)
    ds = frame_arrays(surface, domain, thetas)[2]
    b_domain = periodic_quadrature(trace ** 2 * ds)
    circ = math.sqrt(float(surface.b_coef(r_m)))
    b_ball = periodic_quadrature(trace ** 2) * circ
    return np.array([e_domain, e_ball, b_domain, b_ball])


def proof_step_check(surface, domain, f, n_r=96, n_phi=192):
    """Check the gradient, boundary, and quotient estimates for one f.

    All integrals are recomputed at doubled resolution; disagreement
    beyond a relative 1e-6 raises QuadratureResolutionError instead of
    returning a verdict. Each inequality passes when its margin is at
    least -1e-9 times the scale of its two sides.
    """
    consts = domain_constants(surface, domain)
    coarse = _proof_integrals(surface, domain, f, consts, n_r, n_phi)
    fine = _proof_integrals(surface, domain, f, consts, 2 * n_r, 2 * n_phi)
    scale_all = max(np.abs(fine).max(), 1e-300)
    for c, ff in zip(coarse, fine):
        if abs(c - ff) > 1e-6 * max(abs(ff), 1e-9 * scale_all):
            raise QuadratureResolutionError(
                f"quadrature refinement disagreement: {c!r} vs {ff!r}")
    e_domain, e_ball, b_domain, b_ball = fine

    half = 2.0 / ((2.0 + consts.a) + math.sqrt(consts.a * (consts.a + 4.0)))
    aspect = consts.r_min / consts.r_max
    sec_alpha = math.sqrt(1.0 + consts.a)
    if surface.is_warped:
        h = surface.warp.h
        grad_const = aspect * half
        trace_const = sec_alpha * float(h(consts.r_max) / h(consts.r_min))
    else:
        grad_const = aspect * half
        trace_const = sec_alpha / aspect

    entries = []

    lhs, rhs = float(e_domain), float(grad_const * e_ball)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    entries.append(ProofStepEntry("gradient", lhs, rhs, lhs - rhs,
                                  bool(lhs - rhs >= -1e-9 * scale)))

    # stored with the dominating side first so margin = lhs - rhs >= 0
    lhs, rhs = float(trace_const * b_ball), float(b_domain)
    scale = max(abs(lhs), abs(rhs), 1e-300)
    entries.append(ProofStepEntry("boundary", lhs, rhs, lhs - rhs,
                                  bool(lhs - rhs >= -1e-9 * scale)))

    if b_domain <= 1e-13 * scale_all or b_ball <= 1e-13 * scale_all:
        entries.append(ProofStepEntry("quotient", 0.0, 0.0, 0.0, True))
    else:
        lhs = float(e_domain / b_domain)
        rhs = float((grad_const / trace_const) * (e_ball / b_ball))
        scale = max(abs(lhs), abs(rhs), 1e-300)
        entries.append(ProofStepEntry("quotient", lhs, rhs, lhs - rhs,
                                      bool(lhs - rhs >= -1e-9 * scale)))
    return ProofStepReport(tuple(entries))


# ---------------------------------------------------------------------------
# reproducible random domains


@dataclass(frozen=True)
class DomainSuite:
    """Seeded random star domains plus the observed rejection count."""

    domains: tuple
    attempts: int
    rejected: int

    @property
    def rejection_rate(self):
        return self.rejected / self.attempts if self.attempts else 0.0

    def __iter__(self):
        return iter(self.domains)

    def __len__(self):
        return len(self.domains)


def random_domain_suite(surface, count, max_mode, max_eps, seed, r0=1.0,
                        max_attempts=10_000):
    """Random Fourier domains R = r0 (1 + sum eps_k cos/sin k theta).

    Coefficients are uniform in [-max_eps, max_eps]; draws are rejected
    when R is not strictly positive or, on a warped surface, when the
    domain leaves the warp's declared range. Deterministic for a given
    seed.
    """
    rng = np.random.default_rng(seed)
    limit = surface.usable_max
    domains, rejected, attempts = [], 0, 0
    while len(domains) < count:
        attempts += 1
        if attempts > max_attempts:
            raise RuntimeError("rejection sampling did not terminate")
        cos_pert = rng.uniform(-max_eps, max_eps, size=max_mode)
        sin_pert = rng.uniform(-max_eps, max_eps, size=max_mode)
        cos_coeffs = np.concatenate(([r0], r0 * cos_pert))
        try:
            dom = StarDomain(cos_coeffs, r0 * sin_pert)
        except InvalidDomainError:
            rejected += 1
            continue
        grid = periodic_nodes(4096)
        if math.isfinite(limit) and dom.radius(grid).max() >= limit * (1.0 - 1e-9):
            rejected += 1
            continue
        domains.append(dom)
    return DomainSuite(tuple(domains), attempts, rejected)
