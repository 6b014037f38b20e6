"""Finite-size scaling collapse, power-law fits and logarithmic derivatives."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.interpolate import make_lsq_spline
from scipy.optimize import minimize

__all__ = [
    "ScanPoint",
    "CollapseFit",
    "InsufficientDataError",
    "collapse",
    "collapse_quality",
    "power_law_fit",
    "log_derivative",
]


class InsufficientDataError(ValueError):
    """Too few system sizes or parameter values for a meaningful fit."""


@dataclass(frozen=True)
class ScanPoint:
    L: int
    p: float
    value: float
    stderr: float

    def __post_init__(self):
        if not self.stderr > 0:
            raise ValueError("stderr must be positive")


@dataclass
class CollapseFit:
    p_c: float
    nu: float
    quality: float
    covariance: np.ndarray
    n_points: int
    converged: bool = True
    degenerate: bool = False
    starts: list = field(default_factory=list, repr=False)

    @property
    def stderr(self) -> tuple[float, float]:
        d = np.sqrt(np.clip(np.diag(self.covariance), 0, np.inf))
        return float(d[0]), float(d[1])


def _arrays(points: Sequence[ScanPoint]):
    L = np.array([q.L for q in points], dtype=float)
    p = np.array([q.p for q in points], dtype=float)
    y = np.array([q.value for q in points], dtype=float)
    s = np.array([q.stderr for q in points], dtype=float)
    return L, p, y, s


def _master_residuals(x, y, s, n_knots):
    order = np.argsort(x, kind="stable")
    xs, ys, ws = x[order], y[order], 1.0 / s[order]
    inner = np.quantile(xs, np.linspace(0, 1, n_knots + 2)[1:-1])
    t = np.r_[[xs[0]] * 4, inner, [xs[-1]] * 4]
    spl = make_lsq_spline(xs, ys, t, k=3, w=ws)
    r = np.empty_like(y)
    r[order] = ys - spl(xs)
    return r


def collapse_quality(points_or_arrays, p_c: float, nu: float, n_knots: int = 8) -> float:
    """Weighted mean squared deviation from the master curve, relative to the weighted variance.

    Dividing by the weighted variance of the values makes the quality
    invariant under ``y -> a*y + b`` and under a common rescaling of errors.
    """
    L, p, y, s = points_or_arrays if isinstance(points_or_arrays, tuple) else _arrays(points_or_arrays)
    if nu <= 0:
        return np.inf
    x = (p - p_c) * L ** (1.0 / nu)
    try:
        r = _master_residuals(x, y, s, n_knots)
    except (ValueError, np.linalg.LinAlgError):
        return np.inf
    w = 1.0 / s**2
    w = w / w.sum()
    var = np.sum(w * (y - np.sum(w * y)) ** 2)
    if var <= 0:
        return np.inf
    return float(np.sum(w * r**2) / var)


def _chi2(arrs, p_c, nu, n_knots):
    L, p, y, s = arrs
    x = (p - p_c) * L ** (1.0 / nu)
    try:
        r = _master_residuals(x, y, s, n_knots)
    except (ValueError, np.linalg.LinAlgError):
        return np.inf
    return float(np.sum((r / s) ** 2))


def _hessian(f, x0, h):
    n = len(x0)
    H = np.empty((n, n))
    f0 = f(x0)
    for i in range(n):
        for j in range(i, n):
            ei = np.zeros(n)
            ej = np.zeros(n)
            ei[i] = h[i]
            ej[j] = h[j]
            if i == j:
                H[i, i] = (f(x0 + ei) - 2 * f0 + f(x0 - ei)) / h[i] ** 2
            else:
                H[i, j] = H[j, i] = (
                    f(x0 + ei + ej) - f(x0 + ei - ej) - f(x0 - ei + ej) + f(x0 - ei - ej)
                ) / (4 * h[i] * h[j])
    return H


def collapse(
    points: Sequence[ScanPoint],
    n_knots: int = 8,
    pc_range: tuple[float, float] = (0.12, 0.20),
    nu_range: tuple[float, float] = (0.8, 2.0),
    grid: int = 5,
    nu_max: float = 20.0,
    xatol: float = 1e-7,
) -> CollapseFit:
    """Fit ``(p_c, nu)`` so that ``value`` is a single function of ``(p - p_c) L^{1/nu}``.

    The master curve is a least-squares cubic spline with ``n_knots`` interior
    knots at quantiles of the scaled abscissa.  Nelder-Mead runs from a
    ``grid x grid`` set of starts and the best minimum is reported.  The
    covariance comes from the curvature of the error-weighted chi-square,
    scaled by its reduced value.
    """
    arrs = _arrays(points)
    L, p = arrs[0], arrs[1]
    sizes = np.unique(L)
    if sizes.size < 3:
        raise InsufficientDataError("collapse needs at least 3 distinct system sizes")
    if min(np.unique(p[L == l]).size for l in sizes) < 5:
        raise InsufficientDataError("collapse needs at least 5 parameter values per size")
    if len(points) <= n_knots + 6:
        raise InsufficientDataError("too few points for the master-curve spline")

    def obj(v):
        if not (0.0 < v[1] <= nu_max):
            return np.inf
        return collapse_quality(arrs, v[0], v[1], n_knots)

    best = None
    starts = []
    for pc0 in np.linspace(*pc_range, grid):
        for nu0 in np.linspace(*nu_range, grid):
            res = minimize(
                obj,
                [pc0, nu0],
                method="Nelder-Mead",
                options={"xatol": xatol, "fatol": 1e-12, "maxiter": 4000},
            )
            starts.append((float(res.x[0]), float(res.x[1]), float(res.fun), bool(res.success)))
            if np.isfinite(res.fun) and (best is None or res.fun < best.fun):
                best = res
    if best is None:
        raise RuntimeError("collapse optimizer found no finite objective value")
    pc, nu = map(float, best.x)
    converged = bool(best.success)
    if not converged:
        warnings.warn(f"collapse optimizer did not converge: {best.message}", RuntimeWarning)

    n = len(points)
    chi2 = _chi2(arrs, pc, nu, n_knots)
    dof = max(n - (n_knots + 4) - 2, 1)
    h = np.array([1e-3, 1e-2 * max(nu, 0.1)])
    cov = np.full((2, 2), np.nan)
    degenerate = nu > 0.5 * nu_max
    try:
        Hm = _hessian(lambda v: _chi2(arrs, v[0], v[1], n_knots), np.array([pc, nu]), h)
        ev = np.linalg.eigvalsh(Hm)
        if np.all(np.isfinite(Hm)) and ev.min() > 1e-8 * max(abs(ev).max(), 1e-300):
            cov = 2.0 * np.linalg.inv(Hm) * max(chi2 / dof, 1.0)
        else:
            degenerate = True
    except np.linalg.LinAlgError:
        degenerate = True
    return CollapseFit(pc, nu, float(best.fun), cov, n, converged, bool(degenerate), starts)


def power_law_fit(xs, ys, errs=None) -> tuple[float, float, float]:
    """Fit ``y = A x^k`` by weighted least squares in log-log space.

    Returns ``(k, A, stderr_k)``; the standard error uses the residual
    scatter, so an exact power law gives zero.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit needs positive x and y")
    if x.size < 2:
        raise InsufficientDataError("need at least two points")
    sig = np.ones_like(y) if errs is None else np.asarray(errs, dtype=float) / y
    if np.any(sig <= 0):
        raise ValueError("errors must be positive")
    w = 1.0 / sig
    A = np.stack([np.log(x), np.ones_like(x)], axis=1) * w[:, None]
    b = np.log(y) * w
    coef, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = b - A @ coef
    dof = x.size - 2
    if dof > 0:
        cov = np.linalg.inv(A.T @ A) * (resid @ resid) / dof
        err = float(np.sqrt(max(cov[0, 0], 0.0)))
    else:
        err = np.nan
    return float(coef[0]), float(np.exp(coef[1])), err


def log_derivative(ts, ys) -> np.ndarray:
    """``d ln y / d ln t`` by central differences (one-sided at the ends)."""
    t = np.asarray(ts, dtype=float)
    y = np.asarray(ys, dtype=float)
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("times must be positive and strictly increasing")
    if np.any(y <= 0):
        raise ValueError("values must be positive")
    return np.gradient(np.log(y), np.log(t))
