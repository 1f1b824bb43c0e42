"""Shared numerical kernels.

Adaptive embedded Runge-Kutta integration with dense output, spectrally
accurate periodic quadrature, tensor-product quadrature on a polar cell,
and a dense symmetric-definite generalized eigensolver with null-space
regularization. Everything here is pure and deterministic: identical
inputs produce bit-identical outputs.
"""

import math

import numpy as np

__all__ = [
    "OdeStepError",
    "IndefiniteMassError",
    "OdeTrajectory",
    "GeneralizedEig",
    "ode_solve",
    "periodic_nodes",
    "periodic_quadrature",
    "quad2d_polar",
    "sym_geig",
]


class OdeStepError(RuntimeError):
    """Integration failed: step-size underflow or non-finite right-hand side."""


class IndefiniteMassError(ValueError):
    """Mass matrix has a negative eigenvalue beyond the PSD tolerance."""


# Dormand-Prince 5(4) pair. The fifth-order solution is propagated; the
# embedded fourth-order difference drives the PI step controller. FSAL:
# the seventh stage equals the first stage of the next step.

_DP_C = (0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0)

_DP_A = tuple(np.array(row) for row in (
    (),
    (1.0 / 5.0,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
))

# b5 - b4, applied to the seven stages to estimate the local error.
_DP_ERR = np.array([
    71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
    -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0,
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_ERR_EXPO = 0.17          # 1/5 - 0.75 * beta
_PI_BETA = 0.04           # PI stabilization exponent


class OdeTrajectory:
    """Dense-output trajectory from one adaptive integration.

    Stores the accepted step points together with the right-hand side
    there; values between steps come from piecewise cubic Hermite
    interpolation, which matches the data the embedded pair guarantees.
    """

    def __init__(self, t, y, f):
        self.t = np.asarray(t)
        self.y = np.asarray(y)
        self.f = np.asarray(f)

    @property
    def t_end(self):
        return float(self.t[-1])

    @property
    def y_end(self):
        return self.y[-1]

    @property
    def n_steps(self):
        return len(self.t) - 1

    def sample(self, t_query):
        """Evaluate the trajectory at `t_query` (scalar or 1-D array).

        Queries are clamped to the integration interval; anything more
        than a relative 1e-9 outside raises ValueError.
        """
        tq = np.atleast_1d(np.asarray(t_query, dtype=float))
        t0, t1 = self.t[0], self.t[-1]
        span = max(abs(t0), abs(t1), t1 - t0)
        if tq.min() < t0 - 1e-9 * span or tq.max() > t1 + 1e-9 * span:
            raise ValueError("sample point outside the integrated interval")
        tc = np.clip(tq, t0, t1)

        idx = np.searchsorted(self.t, tc, side="right") - 1
        idx = np.clip(idx, 0, len(self.t) - 2)
        ta = self.t[idx]
        h = self.t[idx + 1] - ta
        s = ((tc - ta) / h)[:, None]

        ya, yb = self.y[idx], self.y[idx + 1]
        fa, fb = self.f[idx], self.f[idx + 1]
        h = h[:, None]
        s2, s3 = s * s, s * s * s
        out = ((2 * s3 - 3 * s2 + 1) * ya + (s3 - 2 * s2 + s) * h * fa
               + (-2 * s3 + 3 * s2) * yb + (s3 - s2) * h * fb)
        if np.isscalar(t_query) or np.ndim(t_query) == 0:
            return out[0]
        return out


def _error_norm(err, scale):
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def _initial_step(rhs, t0, t1, y0, f0, rtol, atol):
    scale = atol + rtol * np.abs(y0)
    d0 = _error_norm(y0, scale)
    d1 = _error_norm(f0, scale)
    h0 = 1e-6 * (t1 - t0) if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    h0 = min(h0, t1 - t0)
    y1 = y0 + h0 * f0
    f1 = rhs(t0 + h0, y1)
    d2 = _error_norm(f1 - f0, scale) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100.0 * h0, h1, t1 - t0)


def ode_solve(rhs, t0, t1, y0, rtol=1e-11, atol=1e-13, max_step=None,
              max_steps=1_000_000):
    """Integrate y' = rhs(t, y) from t0 to t1 (forward) adaptively.

    Parameters
    ----------
    rhs : callable (t, y) -> array
        Vector field; must return finite values.
    t0, t1 : float
        Integration interval, t1 > t0.
    y0 : array_like
        Initial state (1-D).
    rtol : float
        Relative tolerance, in [1e-13, 1e-3].
    atol : float or array_like
        Absolute tolerance, scalar or per component.
    max_step : float, optional
        Step-size cap; keeps the cubic Hermite dense output at the
        accuracy the application needs between the accepted nodes.

    Returns
    -------
    OdeTrajectory
        Accepted steps with dense (cubic Hermite) evaluation.
    """
    if not 1e-13 <= rtol <= 1e-3:
        raise ValueError(f"rtol {rtol} outside [1e-13, 1e-3]")
    if not t1 > t0:
        raise ValueError("require t1 > t0")
    y = np.array(y0, dtype=float, copy=True)
    if y.ndim != 1:
        raise ValueError("y0 must be one-dimensional")
    atol = np.broadcast_to(np.asarray(atol, dtype=float), y.shape)
    if not (np.all(np.isfinite(y)) and np.all(atol >= 0.0)):
        raise ValueError("non-finite initial state or negative atol")

    t = float(t0)
    f = np.asarray(rhs(t, y), dtype=float)
    if not np.all(np.isfinite(f)):
        raise OdeStepError(f"non-finite right-hand side at t={t}")

    ts, ys, fs = [t], [y.copy()], [f.copy()]
    h_cap = math.inf if max_step is None else float(max_step)
    if h_cap <= 0.0:
        raise ValueError("max_step must be positive")
    h = min(_initial_step(rhs, t0, t1, y, f, rtol, atol), h_cap)
    err_prev = 1e-4
    k = np.empty((7, y.size))
    tiny = 16.0 * np.finfo(float).eps

    for _ in range(max_steps):
        if t >= t1:
            break
        h = min(h, t1 - t, h_cap)
        if h <= tiny * max(abs(t), abs(t1)):
            raise OdeStepError(f"step size underflow at t={t}")

        k[0] = f
        for i in range(1, 7):
            yi = y + h * (k[:i].T @ _DP_A[i])
            k[i] = rhs(t + _DP_C[i] * h, yi)
        # stage 6 input is already the fifth-order solution (FSAL)
        y_new = yi
        f_new = k[6]
        if not np.all(np.isfinite(y_new)) or not np.all(np.isfinite(f_new)):
            raise OdeStepError(f"non-finite state during step at t={t}")

        err_vec = h * (k.T @ _DP_ERR)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = _error_norm(err_vec, scale)

        if err <= 1.0:
            t += h
            y, f = y_new, f_new
            ts.append(t)
            ys.append(y.copy())
            fs.append(f.copy())
            fac = (max(err, 1e-10) ** _ERR_EXPO) / (err_prev ** _PI_BETA)
            h /= max(1.0 / _MAX_FACTOR, min(1.0 / _MIN_FACTOR, fac / _SAFETY))
            err_prev = max(err, 1e-4)
        else:
            h /= min(1.0 / _MIN_FACTOR, (err ** _ERR_EXPO) / _SAFETY)
    else:
        raise OdeStepError(f"exceeded {max_steps} steps")

    return OdeTrajectory(np.array(ts), np.array(ys), np.array(fs))


def periodic_nodes(m):
    """Uniform angular grid theta_j = 2*pi*j/m, j = 0..m-1."""
    return 2.0 * np.pi * np.arange(m) / m


def periodic_quadrature(samples):
    """Trapezoidal rule over one period from uniform samples.

    For samples of f at theta_j = 2*pi*j/m this returns
    (2*pi/m) * sum f_j, which is exact to machine precision for
    trigonometric polynomials of degree < m/2.
    """
    vals = np.asarray(samples, dtype=float)
    if vals.ndim != 1 or vals.size < 8:
        raise ValueError("need at least 8 uniform samples")
    return float(vals.sum() * (2.0 * np.pi / vals.size))


def quad2d_polar(integrand, r_max, n_r=64, n_phi=128):
    """Integrate integrand(rho, phi) over [0, r_max] x [0, 2*pi).

    Gauss-Legendre in the radial variable crossed with the trapezoidal
    rule in the angle. `integrand` receives meshgrid arrays of shape
    (n_r, n_phi) and must evaluate vectorized; any Jacobian factor is
    the integrand's responsibility.
    """
    if n_r < 64 or n_phi < 64:
        raise ValueError("need n_r >= 64 and n_phi >= 64")
    x, w = np.polynomial.legendre.leggauss(n_r)
    rho = 0.5 * r_max * (x + 1.0)
    w_r = 0.5 * r_max * w
    phi = periodic_nodes(n_phi)
    grid_r, grid_phi = np.meshgrid(rho, phi, indexing="ij")
    vals = np.asarray(integrand(grid_r, grid_phi), dtype=float)
    if vals.shape != (n_r, n_phi):
        raise ValueError("integrand must return an (n_r, n_phi) array")
    return float(w_r @ vals.sum(axis=1) * (2.0 * np.pi / n_phi))


class GeneralizedEig:
    """Result of a symmetric-definite pencil solve K v = mu M v."""

    def __init__(self, eigenvalues, vectors, dropped):
        self.eigenvalues = eigenvalues
        self.vectors = vectors
        self.dropped = dropped


def _check_symmetric(mat, name):
    mat = np.asarray(mat, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square")
    if not np.all(np.isfinite(mat)):
        raise ValueError(f"{name} has non-finite entries")
    norm = np.abs(mat).max()
    if norm > 0 and np.abs(mat - mat.T).max() > 1e-12 * norm:
        raise ValueError(f"{name} is not symmetric")
    return 0.5 * (mat + mat.T)


def sym_geig(k_mat, m_mat, drop=1e-12):
    """Solve the symmetric pencil K v = mu M v with Gram regularization.

    M is eigendecomposed; directions whose eigenvalue falls below
    `drop` times the largest (or below zero) are discarded, the rest
    whitened, and the projected symmetric problem solved densely.

    Returns a GeneralizedEig with ascending eigenvalues, the matching
    eigenvectors as columns (in the original coordinates), and the
    number of dropped directions. Deterministic for identical inputs.
    """
    k_mat = _check_symmetric(k_mat, "stiffness matrix")
    m_mat = _check_symmetric(m_mat, "mass matrix")
    if k_mat.shape != m_mat.shape:
        raise ValueError("matrix orders differ")

    lam, v = np.linalg.eigh(m_mat)
    norm_m = np.abs(lam).max()
    if norm_m == 0.0:
        raise IndefiniteMassError("mass matrix is zero")
    if lam[0] < -1e-12 * norm_m:
        raise IndefiniteMassError(
            f"mass matrix indefinite: min eigenvalue {lam[0]:.3e} of norm {norm_m:.3e}")

    keep = lam > max(drop * lam[-1], 0.0)
    dropped = int(len(lam) - keep.sum())
    if not keep.any():
        raise IndefiniteMassError("all mass-matrix directions dropped")

    white = v[:, keep] / np.sqrt(lam[keep])
    proj = white.T @ k_mat @ white
    proj = 0.5 * (proj + proj.T)
    mu, y = np.linalg.eigh(proj)
    return GeneralizedEig(mu, white @ y, dropped)
