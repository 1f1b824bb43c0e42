"""Closed-form lower bounds for Steklov eigenvalues of star-shaped domains.

The central quantity is the steepness factor

    F(a) = ((2 + a) - sqrt(a^2 + 4 a)) / (2 sqrt(1 + a)),

computed here in the cancellation-free form
F(a) = 2 / (((2 + a) + sqrt(a^2 + 4 a)) * sqrt(1 + a)). F(0) = 1 and F
decreases to 0, so every bound degenerates to the ball value exactly
when the domain is a coordinate ball (a = 0, R_m = R_M).

Bounds relative to the inscribed-ball spectrum:

    warped surface:  (R_m/R_M) F(a) (h(R_m)/h(R_M))^{n-1} mu_l(B(R_m))
    paraboloid:      (R_m/R_M)^3 F(a) mu_l(B(R_m))
    sphere, l=2:     (R_m/R_M) F(a) (sin R_m / sin R_M)^{n-1} mu_2(B(R_m))

Classical planar catalog (no ball spectrum needed):

    Kuttler-Sigillito, l = 2k and 2k+1:
        k [1 - 2/(1 + sqrt(1 + 4 q))] / max sqrt(R^2 + R'^2),
        q = min over R' != 0 of (R/R')^2 (q = +inf for a circle)
    Garcia-Montano, l = 2:  (R_m^{n-2}/R_M^{n-1}) F(a)
    Bramble-Payne,  l = 2:  (R_m^{n-1}/R_M^{n+1}) h_m,
        h_m = min <x, nu> = min R^2/sqrt(R^2 + R'^2)
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .geometry import domain_constants, frame_arrays, golden_max

__all__ = [
    "SurfaceMismatchError",
    "BoundFormula",
    "BoundValue",
    "shape_factor",
    "bound_main_warped",
    "bound_paraboloid",
    "bound_kuttler_sigillito",
    "bound_garcia_montano",
    "bound_sphere_mu2",
    "bound_bramble_payne",
]


class SurfaceMismatchError(ValueError):
    """Ball spectrum and domain constants belong to different setups."""


class BoundFormula(enum.Enum):
    """Catalog of implemented lower-bound formulas."""

    MAIN_WARPED = "main_warped"
    PARABOLOID_MAIN = "paraboloid_main"
    KUTTLER_SIGILLITO = "kuttler_sigillito"
    GARCIA_MONTANO = "garcia_montano"
    SPHERE_MU2 = "sphere_mu2"
    BRAMBLE_PAYNE = "bramble_payne"

    def applies_to(self, surface):
        if self is BoundFormula.MAIN_WARPED:
            return surface.is_warped
        if self is BoundFormula.PARABOLOID_MAIN:
            return not surface.is_warped
        if self is BoundFormula.SPHERE_MU2:
            return surface.is_warped and surface.warp.kind == "sphere"
        return surface.is_warped and surface.warp.kind == "plane"

    @property
    def mu2_only(self):
        return self in (BoundFormula.GARCIA_MONTANO, BoundFormula.SPHERE_MU2,
                        BoundFormula.BRAMBLE_PAYNE)

    @property
    def needs_ball(self):
        return self in (BoundFormula.MAIN_WARPED, BoundFormula.PARABOLOID_MAIN,
                        BoundFormula.SPHERE_MU2)


@dataclass(frozen=True)
class BoundValue:
    """One evaluated lower bound.

    `l` uses the 1-based convention with mu_1 = 0. For ball-relative
    formulas value = factor * mu_l(B(R_m)); for the planar catalog
    `factor` is the dimensionless sharpness of the bound (its ratio to
    the corresponding circle quantity), always in (0, 1].
    """

    formula: BoundFormula
    l: int
    value: float
    factor: float
    needs_ball: bool


def shape_factor(a):
    """Steepness factor F(a) = ((2+a) - sqrt(a^2+4a)) / (2 sqrt(1+a))."""
    if not (a >= 0.0 and math.isfinite(a)):
        raise ValueError(f"steepness a must be finite and >= 0, got {a}")
    return 2.0 / (((2.0 + a) + math.sqrt(a * (a + 4.0))) * math.sqrt(1.0 + a))


def _check_ball(ball, surface, consts, n):
    if ball.surface != surface:
        raise SurfaceMismatchError("ball spectrum computed on a different surface")
    if ball.n != n:
        raise SurfaceMismatchError(f"ball dimension {ball.n} != requested {n}")
    if abs(ball.radius - consts.r_min) > 1e-9 * max(1.0, consts.r_min):
        raise SurfaceMismatchError(
            f"ball radius {ball.radius} != inscribed radius {consts.r_min}")


def bound_main_warped(surface, consts, ball, l, n=2):
    """Lower bound for mu_l on a warped surface, relative to B(R_m)."""
    if not surface.is_warped:
        raise ValueError("main warped bound needs a warped surface")
    _check_ball(ball, surface, consts, n)
    h = surface.warp.h
    factor = ((consts.r_min / consts.r_max) * shape_factor(consts.a)
              * float(h(consts.r_min) / h(consts.r_max)) ** (n - 1))
    return BoundValue(BoundFormula.MAIN_WARPED, l, factor * ball.mu(l),
                      factor, True)


def bound_paraboloid(consts, ball, l):
    """Lower bound for mu_l on the paraboloid, relative to B(R_m)."""
    if ball.surface.is_warped:
        raise ValueError("paraboloid bound needs a paraboloid ball spectrum")
    if abs(ball.radius - consts.r_min) > 1e-9 * max(1.0, consts.r_min):
        raise SurfaceMismatchError(
            f"ball radius {ball.radius} != inscribed radius {consts.r_min}")
    factor = (consts.r_min / consts.r_max) ** 3 * shape_factor(consts.a)
    return BoundValue(BoundFormula.PARABOLOID_MAIN, l, factor * ball.mu(l),
                      factor, True)


def bound_sphere_mu2(consts, ball, n=2):
    """Lower bound for mu_2 of a star-shaped domain on the round sphere."""
    if not (ball.surface.is_warped and ball.surface.warp.kind == "sphere"):
        raise ValueError("sphere bound needs a spherical-cap spectrum")
    if abs(ball.radius - consts.r_min) > 1e-9 * max(1.0, consts.r_min):
        raise SurfaceMismatchError(
            f"ball radius {ball.radius} != inscribed radius {consts.r_min}")
    factor = ((consts.r_min / consts.r_max) * shape_factor(consts.a)
              * (math.sin(consts.r_min) / math.sin(consts.r_max)) ** (n - 1))
    return BoundValue(BoundFormula.SPHERE_MU2, 2, factor * ball.mu(2),
                      factor, True)


def bound_garcia_montano(consts, n=2):
    """Lower bound for mu_2 of a star-shaped Euclidean domain in dimension n."""
    value = (consts.r_min ** (n - 2) / consts.r_max ** (n - 1)
             * shape_factor(consts.a))
    return BoundValue(BoundFormula.GARCIA_MONTANO, 2, value,
                      shape_factor(consts.a), False)


def _require_plane(surface):
    if not (surface.is_warped and surface.warp.kind == "plane"):
        raise ValueError("this bound applies to planar domains only")


def bound_kuttler_sigillito(surface, domain, k, grid=4096):
    """Planar lower bound for mu_{2k} (and mu_{2k+1}) from boundary steepness.

    q is minimized over angles where R' does not vanish; for a circle
    (R' identically 0) the bracket equals 1 and the bound is k/R, the
    exact circle eigenvalue.
    """
    _require_plane(surface)
    if k < 1:
        raise ValueError("mode index k must be >= 1")
    consts = domain_constants(surface, domain, grid)
    # q = min (R/R')^2 over {R' != 0} equals 1/max (R'/R)^2 = 1/a
    if consts.a <= 0.0:
        bracket = 1.0
    else:
        q = 1.0 / consts.a
        bracket = 1.0 - 2.0 / (1.0 + math.sqrt(1.0 + 4.0 * q))

    thetas = 2.0 * np.pi * np.arange(grid) / grid
    ds = frame_arrays(surface, domain, thetas)[2]

    def ds_at(t):
        return float(frame_arrays(surface, domain, t)[2])

    idx = int(np.argmax(ds))
    step = thetas[1] - thetas[0]
    _, ds_max = golden_max(ds_at, thetas[idx] - step, thetas[idx] + step)
    ds_max = max(ds_max, float(ds[idx]))
    return BoundValue(BoundFormula.KUTTLER_SIGILLITO, 2 * k,
                      k * bracket / ds_max, bracket, False)


def bound_bramble_payne(surface, domain, n=2, grid=4096):
    """Planar support-function lower bound for mu_2.

    h_m is the minimal support <x, nu> = R^2/sqrt(R^2 + R'^2) of the
    boundary curve; the bound is R_m^{n-1} h_m / R_M^{n+1}.
    """
    _require_plane(surface)
    consts = domain_constants(surface, domain, grid)
    thetas = 2.0 * np.pi * np.arange(grid) / grid
    r, _, ds = frame_arrays(surface, domain, thetas)[:3]
    support = r ** 2 / ds

    def neg_support(t):
        rr, _, dd = frame_arrays(surface, domain, t)[:3]
        return -float(rr ** 2 / dd)

    idx = int(np.argmin(support))
    step = thetas[1] - thetas[0]
    _, neg_min = golden_max(neg_support, thetas[idx] - step, thetas[idx] + step)
    h_m = min(-neg_min, float(support[idx]))
    value = consts.r_min ** (n - 1) / consts.r_max ** (n + 1) * h_m
    factor = consts.r_min ** (n - 1) * h_m / consts.r_max ** n
    return BoundValue(BoundFormula.BRAMBLE_PAYNE, 2, value, factor, False)
