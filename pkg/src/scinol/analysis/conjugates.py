"""Closed-form Fenchel conjugates of the exponential potentials and a
golden-section oracle for checking them numerically."""
from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _check(alpha, gamma):
    if np.any(np.asarray(alpha) <= 0) or np.any(np.asarray(gamma) <= 0):
        raise DomainError("alpha and gamma must be positive")


def fenchel_bound_1(u, alpha, gamma):
    """Conjugate of alpha (e^{|x|/gamma} - |x|/gamma - 1).

    Returns ``(exact, upper_bound)``::

        exact = (|u| gamma + alpha) ln(1 + |u| gamma / alpha) - |u| gamma
        bound = |u| gamma ln(1 + |u| gamma / alpha)
    """
    _check(alpha, gamma)
    ug = np.abs(np.asarray(u, dtype=np.float64)) * gamma
    r = ug / alpha
    log_term = np.log1p(r)
    # alpha ((1 + r) ln(1 + r) - r); the series avoids cancellation for small r
    series = r * r * (0.5 - r * (1 / 6 - r / 12))
    exact = alpha * np.where(r < 1e-3, series, (1 + r) * log_term - r)
    bound = ug * log_term
    if np.ndim(exact) == 0:
        return float(exact), float(bound)
    return exact, bound


def fenchel_bound_2(u, alpha, gamma):
    """Upper bound |u| gamma (ln(|u| gamma / alpha) - 1) on the conjugate of
    alpha e^{|x|/gamma}; the u -> 0 limit is 0."""
    _check(alpha, gamma)
    ug = np.abs(np.asarray(u, dtype=np.float64)) * gamma
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(ug > 0, ug * (np.log(ug / alpha) - 1.0), 0.0)
    return float(out) if out.ndim == 0 else out


def golden_section_max(fn, lo, hi, tol=1e-10, max_iter=300):
    """Maximise a unimodal ``fn`` on [lo, hi]; vectorised over array bounds.

    Returns ``(argmax, max_value)``. The endpoints are compared at the end so
    a maximum sitting on the boundary is not missed.
    """
    a = np.array(lo, dtype=np.float64, copy=True)
    b = np.array(hi, dtype=np.float64, copy=True)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    for _ in range(max_iter):
        if np.all(b - a <= tol * np.maximum(1.0, np.abs(a) + np.abs(b))):
            break
        left = fc > fd
        # left probe wins: keep [a, d]; otherwise keep [c, b]
        a, b = np.where(left, a, c), np.where(left, d, b)
        c_new = np.where(left, b - INV_PHI * (b - a), d)
        d_new = np.where(left, c, a + INV_PHI * (b - a))
        fc, fd = np.where(left, fn(c_new), fd), np.where(left, fc, fn(d_new))
        c, d = c_new, d_new
    x = (a + b) / 2
    candidates = np.stack([np.asarray(lo, float) + 0 * x, x, np.asarray(hi, float) + 0 * x])
    values = np.stack([fn(candidates[0]), fn(candidates[1]), fn(candidates[2])])
    best = np.argmax(values, axis=0)
    pick = np.take_along_axis(candidates, best[None], 0)[0]
    val = np.take_along_axis(values, best[None], 0)[0]
    return pick, val


def numeric_conjugate(f, u, gamma, span=50.0, tol=1e-10):
    """sup_x {u x - f(x)} for an even convex ``f``, searched over [0, span*gamma]."""
    au = np.abs(np.asarray(u, dtype=np.float64))
    hi = span * np.asarray(gamma, dtype=np.float64) + 0 * au
    _, val = golden_section_max(lambda x: au * x - f(x), np.zeros_like(hi), hi, tol)
    return val


def conjugate_oracle_1(u, alpha, gamma, **kw):
    """Numeric conjugate of alpha (e^{|x|/gamma} - |x|/gamma - 1)."""
    def f(x):
        r = np.abs(x) / gamma
        return alpha * (np.expm1(r) - r)
    return numeric_conjugate(f, u, gamma, **kw)


def conjugate_oracle_2(u, alpha, gamma, **kw):
    """Numeric conjugate of alpha e^{|x|/gamma}."""
    return numeric_conjugate(lambda x: alpha * np.exp(np.abs(x) / gamma), u, gamma, **kw)
