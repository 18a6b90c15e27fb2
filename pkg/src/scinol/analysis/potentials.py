"""Potential functions behind the two learners."""
from __future__ import annotations

import numpy as np


def h_fn(y):
    """Quadratic for |y| <= 1, linear beyond: y^2/2 or |y| - 1/2."""
    a = np.abs(np.asarray(y, dtype=np.float64))
    out = np.where(a <= 1.0, 0.5 * a * a, a - 0.5)
    return float(out) if out.ndim == 0 else out


def _scaled(x, s_hat):
    x = np.asarray(x, dtype=np.float64)
    s_hat = np.asarray(s_hat, dtype=np.float64)
    ratio = np.zeros(np.broadcast(x, s_hat).shape)
    np.divide(np.abs(x), s_hat, out=ratio, where=s_hat > 0)
    return ratio, s_hat > 0


def psi1(x, beta, s_hat):
    """beta (e^{|x|/(2 S)} - |x|/(2 S) - 1), and 0 when S == 0."""
    ratio, live = _scaled(x, s_hat)
    a = ratio / 2
    with np.errstate(over="ignore"):  # huge |x| / S is a genuine +inf
        out = np.where(live, np.asarray(beta) * (np.expm1(a) - a), 0.0)
    return float(out) if out.ndim == 0 else out


def psi2(x, s_hat):
    """exp(h(x / S) / 2), and 1 when S == 0."""
    ratio, live = _scaled(x, s_hat)
    with np.errstate(over="ignore"):
        out = np.where(live, np.exp(0.5 * h_fn(ratio)), 1.0)
    return float(out) if out.ndim == 0 else out
