"""Surfaces of revolution, warp functions, and star-shaped domains.

A surface is described in polar coordinates (r, theta) by a metric
A(r) dr^2 + B(r) dtheta^2: warped surfaces have A = 1, B = h(r)^2 for a
warp h with h(0) = 0, h'(0) = 1; the paraboloid z = x^2 + y^2 carries
A = 1 + 4 r^2, B = r^2. Domains are radial graphs r < R(theta) with R a
truncated Fourier series, star-shaped about the pole.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "WarpDomainError",
    "InvalidDomainError",
    "WarpFunction",
    "SurfaceMetric",
    "StarDomain",
    "BoundaryFrame",
    "DomainConstants",
    "validate_warp",
    "boundary_frame",
    "frame_arrays",
    "domain_constants",
    "golden_max",
]


class WarpDomainError(ValueError):
    """A radius beyond the warp's declared domain was requested."""


class InvalidDomainError(ValueError):
    """Boundary radius function is not strictly positive."""


class WarpFunction:
    """Warp h(r) of a surface of revolution, with its derivative.

    Builtins: plane h = r, sphere h = sin r, tanh h = tanh r. Tabulated
    warps interpolate (knots, values) with a cubic spline and take h'
    from the spline; their admissibility is checked by sampling only.
    """

    def __init__(self, kind, domain_max, h=None, dh=None):
        if domain_max <= 0:
            raise ValueError("domain_max must be positive")
        self.kind = kind
        self.domain_max = float(domain_max)
        self._h = h
        self._dh = dh

    @classmethod
    def plane(cls, domain_max=math.inf):
        return cls("plane", domain_max, h=lambda r: np.asarray(r, dtype=float),
                   dh=lambda r: np.ones_like(np.asarray(r, dtype=float)))

    @classmethod
    def sphere(cls, domain_max=math.pi / 2):
        return cls("sphere", domain_max, h=np.sin, dh=np.cos)

    @classmethod
    def tanh(cls, domain_max=math.inf):
        return cls("tanh", domain_max, h=np.tanh,
                   dh=lambda r: 1.0 / np.cosh(r) ** 2)

    @classmethod
    def from_table(cls, knots, values, domain_max=None):
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if knots.ndim != 1 or knots.size < 4 or np.any(np.diff(knots) <= 0):
            raise ValueError("need at least 4 strictly increasing knots")
        if knots[0] != 0.0:
            raise ValueError("first knot must be r = 0")
        spline = CubicSpline(knots, values)
        dmax = float(knots[-1]) if domain_max is None else float(domain_max)
        if dmax > knots[-1]:
            raise ValueError("domain_max exceeds the tabulated range")
        return cls("spline", dmax, h=spline, dh=spline.derivative())

    def h(self, r):
        return np.asarray(self._h(r), dtype=float)

    def dh(self, r):
        return np.asarray(self._dh(r), dtype=float)

    def __eq__(self, other):
        if not isinstance(other, WarpFunction):
            return NotImplemented
        return self.kind == other.kind and self.domain_max == other.domain_max

    def __repr__(self):
        return f"WarpFunction({self.kind!r}, domain_max={self.domain_max!r})"


class SurfaceMetric:
    """Rotationally symmetric metric A(r) dr^2 + B(r) dtheta^2."""

    def __init__(self, variant, warp=None):
        if variant not in ("warped", "paraboloid"):
            raise ValueError(f"unknown variant {variant!r}")
        if variant == "warped" and warp is None:
            raise ValueError("warped surface needs a WarpFunction")
        self.variant = variant
        self.warp = warp if variant == "warped" else None

    @classmethod
    def warped(cls, warp):
        return cls("warped", warp)

    @classmethod
    def plane(cls, domain_max=math.inf):
        return cls("warped", WarpFunction.plane(domain_max))

    @classmethod
    def sphere(cls, domain_max=math.pi / 2):
        return cls("warped", WarpFunction.sphere(domain_max))

    @classmethod
    def tanh(cls, domain_max=math.inf):
        return cls("warped", WarpFunction.tanh(domain_max))

    @classmethod
    def paraboloid(cls):
        return cls("paraboloid")

    @property
    def is_warped(self):
        return self.variant == "warped"

    @property
    def label(self):
        return self.warp.kind if self.is_warped else "paraboloid"

    @property
    def usable_max(self):
        """Largest radius the surface data covers."""
        return self.warp.domain_max if self.is_warped else math.inf

    def a_coef(self, r):
        r = np.asarray(r, dtype=float)
        if self.is_warped:
            return np.ones_like(r)
        return 1.0 + 4.0 * r ** 2

    def b_coef(self, r):
        if self.is_warped:
            return self.warp.h(r) ** 2
        return np.asarray(r, dtype=float) ** 2

    def da_coef(self, r):
        r = np.asarray(r, dtype=float)
        if self.is_warped:
            return np.zeros_like(r)
        return 8.0 * r

    def db_coef(self, r):
        if self.is_warped:
            return 2.0 * self.warp.h(r) * self.warp.dh(r)
        return 2.0 * np.asarray(r, dtype=float)

    def s_coef(self, r):
        """S(r) = sqrt(B/A), the warp of the conformal radial equation."""
        if self.is_warped:
            return self.warp.h(r)
        r = np.asarray(r, dtype=float)
        return r / np.sqrt(1.0 + 4.0 * r ** 2)

    def ds_coef(self, r):
        if self.is_warped:
            return self.warp.dh(r)
        r = np.asarray(r, dtype=float)
        return (1.0 + 4.0 * r ** 2) ** -1.5

    def __eq__(self, other):
        if not isinstance(other, SurfaceMetric):
            return NotImplemented
        return self.variant == other.variant and self.warp == other.warp

    def __repr__(self):
        if self.is_warped:
            return f"SurfaceMetric.warped({self.warp!r})"
        return "SurfaceMetric.paraboloid()"


class StarDomain:
    """Boundary radius R(theta) as a truncated Fourier series.

    R(theta) = cos_coeffs[0] + sum_k cos_coeffs[k] cos(k theta)
                             + sum_k sin_coeffs[k-1] sin(k theta),
    with the derivative taken analytically. Positivity is verified on a
    dense grid at construction.
    """

    _POSITIVITY_GRID = 1024

    def __init__(self, cos_coeffs, sin_coeffs=()):
        cos_coeffs = np.atleast_1d(np.asarray(cos_coeffs, dtype=float))
        sin_coeffs = np.atleast_1d(np.asarray(sin_coeffs, dtype=float)) \
            if len(sin_coeffs) else np.zeros(0)
        if cos_coeffs.size < 1:
            raise ValueError("need at least the constant coefficient")
        self.cos_coeffs = cos_coeffs
        self.sin_coeffs = sin_coeffs
        self.max_mode = max(cos_coeffs.size - 1, sin_coeffs.size)

        grid = max(self._POSITIVITY_GRID, 16 * (self.max_mode + 1))
        theta = 2.0 * np.pi * np.arange(grid) / grid
        r = self.radius(theta)
        if r.min() <= 0.0:
            raise InvalidDomainError(
                f"R(theta) is not positive (min {r.min():.3e} on a {grid}-point grid)")

    @classmethod
    def constant(cls, r0):
        return cls([float(r0)])

    def _modes(self, theta):
        theta = np.asarray(theta, dtype=float)
        kc = np.arange(1, self.cos_coeffs.size)
        ks = np.arange(1, self.sin_coeffs.size + 1)
        return theta, kc, ks

    def radius(self, theta):
        theta, kc, ks = self._modes(theta)
        r = np.full_like(theta, self.cos_coeffs[0], dtype=float)
        if kc.size:
            r = r + np.cos(np.multiply.outer(theta, kc)) @ self.cos_coeffs[1:]
        if ks.size:
            r = r + np.sin(np.multiply.outer(theta, ks)) @ self.sin_coeffs
        return r

    def dradius(self, theta):
        theta, kc, ks = self._modes(theta)
        rp = np.zeros_like(theta, dtype=float)
        if kc.size:
            rp = rp - np.sin(np.multiply.outer(theta, kc)) @ (kc * self.cos_coeffs[1:])
        if ks.size:
            rp = rp + np.cos(np.multiply.outer(theta, ks)) @ (ks * self.sin_coeffs)
        return rp

    def rotated(self, phase):
        """Same curve with theta shifted by `phase` (R'(theta) = R(theta - phase))."""
        kmax = self.max_mode
        c = np.zeros(kmax + 1)
        s = np.zeros(kmax)
        c[:self.cos_coeffs.size] = self.cos_coeffs
        s[:self.sin_coeffs.size] = self.sin_coeffs
        k = np.arange(1, kmax + 1)
        ck, sk = np.cos(k * phase), np.sin(k * phase)
        new_c = np.concatenate(([c[0]], c[1:] * ck - s * sk))
        new_s = c[1:] * sk + s * ck
        return StarDomain(new_c, new_s)

    def scaled(self, factor):
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return StarDomain(self.cos_coeffs * factor, self.sin_coeffs * factor)

    @property
    def is_constant(self):
        return (np.all(self.cos_coeffs[1:] == 0.0)
                and np.all(self.sin_coeffs == 0.0))

    def __repr__(self):
        return (f"StarDomain(cos={self.cos_coeffs.tolist()}, "
                f"sin={self.sin_coeffs.tolist()})")


@dataclass(frozen=True)
class BoundaryFrame:
    """Boundary geometry of the curve r = R(theta) at one angle.

    ds_dtheta is the arc-element density sqrt(A R'^2 + B); tan2_angle
    the squared tangent of the angle between the outward normal and the
    radial direction, A R'^2 / B; (n_r, n_theta) the components of the
    unit outward normal, so the normal derivative of f is
    n_r f_r + n_theta f_theta.
    """

    theta: float
    radius: float
    dradius: float
    ds_dtheta: float
    cos_angle: float
    tan2_angle: float
    n_r: float
    n_theta: float


@dataclass(frozen=True)
class DomainConstants:
    """Extremal boundary data: radii R_m <= R_M, steepness a = tan^2(alpha)."""

    r_min: float
    r_max: float
    a: float
    alpha: float


def validate_warp(warp, r_max, samples=256):
    """Check warp admissibility on [0, r_max] by dense sampling.

    Conditions: h(0) = 0 and h'(0) = 1; h non-decreasing; h(r)/r
    non-increasing (both non-strict); and the scaling consequences
    h(a r) >= a h(r) for a <= 1, h(a r) <= a h(r) for a >= 1, sampled
    for a in {0.25, 0.5, 0.75, 1.5, 2} wherever a r stays inside the
    declared domain. Returns the list of violated conditions (empty if
    the warp is admissible).
    """
    if samples < 64:
        raise ValueError("need at least 64 samples")
    if r_max > warp.domain_max * (1.0 + 1e-12):
        raise WarpDomainError(
            f"r_max {r_max} exceeds warp domain_max {warp.domain_max}")

    tol = 1e-12
    origin_tol = 1e-12 if warp.kind != "spline" else 1e-6
    violations = []

    h0 = float(warp.h(0.0))
    if abs(h0) > origin_tol:
        violations.append(f"h(0) = {h0:.3e} != 0")
    dh0 = float(warp.dh(0.0))
    if abs(dh0 - 1.0) > origin_tol:
        violations.append(f"h'(0) = {dh0:.6e} != 1")

    r = np.linspace(0.0, r_max, samples + 1)[1:]
    h = warp.h(r)
    scale = max(np.abs(h).max(), 1.0)
    if np.any(np.diff(h) < -tol * scale):
        violations.append("h is not non-decreasing")
    ratio = h / r
    if np.any(np.diff(ratio) > tol * max(np.abs(ratio).max(), 1.0)):
        violations.append("h(r)/r is not non-increasing")

    for a in (0.25, 0.5, 0.75):
        if np.any(warp.h(a * r) < a * h - tol * scale):
            violations.append(f"h({a}*r) >= {a}*h(r) fails")
    for a in (1.5, 2.0):
        mask = a * r <= warp.domain_max
        if mask.any() and np.any(warp.h(a * r[mask]) > a * h[mask] + tol * scale):
            violations.append(f"h({a}*r) <= {a}*h(r) fails")

    return violations


def _frame_parts(surface, domain, theta):
    theta = np.asarray(theta, dtype=float)
    r = domain.radius(theta)
    rp = domain.dradius(theta)
    a = surface.a_coef(r)
    b = surface.b_coef(r)
    ds = np.sqrt(a * rp ** 2 + b)
    tan2 = a * rp ** 2 / b
    cosang = 1.0 / np.sqrt(1.0 + tan2)
    nlen = np.sqrt(1.0 / a + rp ** 2 / b)
    n_r = (1.0 / a) / nlen
    n_theta = (-rp / b) / nlen
    return r, rp, ds, cosang, tan2, n_r, n_theta


def boundary_frame(surface, domain, theta):
    """BoundaryFrame of the domain at a single angle."""
    r, rp, ds, cosang, tan2, n_r, n_theta = _frame_parts(surface, domain, theta)
    return BoundaryFrame(float(theta), float(r), float(rp), float(ds),
                         float(cosang), float(tan2), float(n_r), float(n_theta))


def frame_arrays(surface, domain, thetas):
    """Vectorized boundary frame: arrays (R, R', ds, cos, tan2, n_r, n_theta)."""
    return _frame_parts(surface, domain, np.asarray(thetas, dtype=float))


def golden_max(fun, lo, hi, tol=1e-10, max_iter=200):
    """Golden-section maximizer of a scalar function on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)


def _refined_extremum(fun, thetas, values, maximize, tol=1e-10):
    idx = int(np.argmax(values) if maximize else np.argmin(values))
    step = thetas[1] - thetas[0]
    lo, hi = thetas[idx] - step, thetas[idx] + step
    if maximize:
        _, val = golden_max(fun, lo, hi, tol)
        return max(val, float(values[idx]))
    _, val = golden_max(lambda t: -fun(t), lo, hi, tol)
    return min(-val, float(values[idx]))


def domain_constants(surface, domain, grid=4096):
    """Extremal radii and steepness constant of a star-shaped domain.

    R_m and R_M are the min and max of R over a `grid`-point angular
    grid, polished by golden-section refinement near the grid
    extremizer; a is the max of tan^2 of the normal-radial angle
    (A R'^2 / B on the boundary), refined the same way, and
    alpha = arctan(sqrt(a)).
    """
    if grid < 1024:
        raise ValueError("need grid >= 1024")
    thetas = 2.0 * np.pi * np.arange(grid) / grid
    r = domain.radius(thetas)
    if r.min() <= 0.0:
        raise InvalidDomainError("R(theta) must be positive")

    r_min = _refined_extremum(lambda t: float(domain.radius(t)),
                              thetas, r, maximize=False)
    r_max = _refined_extremum(lambda t: float(domain.radius(t)),
                              thetas, r, maximize=True)

    def tan2_at(t):
        return float(_frame_parts(surface, domain, t)[4])

    tan2 = _frame_parts(surface, domain, thetas)[4]
    a = _refined_extremum(tan2_at, thetas, tan2, maximize=True)
    a = max(a, 0.0)
    return DomainConstants(r_min, r_max, a, math.atan(math.sqrt(a)))
