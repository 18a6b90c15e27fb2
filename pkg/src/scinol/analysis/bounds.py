"""Regret of a recorded run and the regret bounds it should respect."""
from __future__ import annotations

import math

import numpy as np

from ..core import Loss, dot_predict
from ..errors import ConfigError, DimensionError, UndefinedFeatureError
from .history import RunHistory


def _comparator(u, hist: RunHistory) -> np.ndarray:
    u = np.asarray(u, dtype=np.float64)
    if u.shape != hist.cell_shape:
        raise DimensionError(f"comparator shape {u.shape} != {hist.cell_shape}")
    return u


def _epsilon(eps, hist):
    eps = hist.epsilon if eps is None else eps
    if eps is None or not eps > 0:
        raise ConfigError("a positive epsilon is required")
    return float(eps)


def theorem1_bound(u, hist: RunHistory, eps=None) -> float:
    """Sum over cells of 2|u| S ln(1 + 2|u| S T / eps) + eps (1 + ln T)."""
    if hist.T == 0:
        raise ConfigError("bound needs at least one trial")
    u = _comparator(u, hist)
    eps = _epsilon(eps, hist)
    T = hist.T
    us = np.abs(u) * hist.s_hat()
    return float(np.sum(2 * us * np.log1p(2 * us * T / eps)) + u.size * eps * (1 + math.log(T)))


def theorem2_bound(u, hist: RunHistory, eps=None) -> float:
    """cells * eps + sum of 2|u| S (ln(3 |u| S^3 / (eps x_tau^2)) - 1)."""
    u = _comparator(u, hist)
    eps = _epsilon(eps, hist)
    s_hat = hist.s_hat()
    tau, x_tau = hist.tau()
    if hist.num_outputs is not None:
        x_tau = x_tau[:, None] + np.zeros_like(u)
        tau = tau[:, None] + np.zeros(u.shape, dtype=np.int64)
    live = u != 0
    if np.any(live & (tau == 0)):
        raise UndefinedFeatureError("comparator weights a feature that is always zero")
    au, s, xt = np.abs(u[live]), s_hat[live], x_tau[live]
    terms = 2 * au * s * (np.log(3 * au * s ** 3 / (eps * xt * xt)) - 1)
    return float(u.size * eps + np.sum(terms))


def linearized_regret(hist: RunHistory, u) -> float:
    """sum_t g_t x_t^T (w_t - u), which equals sum_t g_t x_t^T w_t + G_T . u."""
    u = _comparator(u, hist)
    st = hist.folded_stats()
    return float(st["gxw"]) + float(np.sum(st["G"] * u))


def true_regret(hist: RunHistory, u, loss: Loss) -> float:
    """sum_t loss(y_t, yhat_t) - loss(y_t, x_t^T u); needs labels in the records."""
    u = _comparator(u, hist)
    total = 0.0
    for rec in hist.records:
        if rec.y is None:
            raise ConfigError("history has no labels; record them to get the true regret")
        total += loss.value(rec.y, rec.yhat) - loss.value(rec.y, dot_predict(u, rec.x))
    return total


def ogd_bound(u, rates, s2) -> float:
    """sum_i u_i^2 / (2 eta_i) + eta_i S2_i / 2 for OGD with fixed per-dimension rates."""
    u, rates, s2 = (np.asarray(a, dtype=np.float64) for a in (u, rates, s2))
    with np.errstate(divide="ignore", invalid="ignore"):
        first = np.where(u == 0, 0.0, u * u / (2 * rates))
    return float(np.sum(first + rates * s2 / 2))


def ideal_bound(u, s2) -> float:
    """sum_i |u_i| S_i, attained by OGD under oracle tuning eta_i = |u_i| / S_i."""
    return float(np.sum(np.abs(u) * np.sqrt(s2)))


def oracle_rates(u, s2) -> np.ndarray:
    u, s = np.abs(np.asarray(u, float)), np.sqrt(np.asarray(s2, float))
    out = np.zeros_like(u)
    np.divide(u, s, out=out, where=s > 0)
    return out
