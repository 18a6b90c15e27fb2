"""Reference online learners that are *not* scale invariant.

The ``*_step`` functions are pure and elementwise; the learner classes wrap
them behind the same begin_trial / feedback protocol as the ScInOL learners.
All of them start from w_1 = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, DimensionError, NonFiniteError
from .learners import OnlineLearner

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
STABILITY_DELTA = 1e-8


def _finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise NonFiniteError("non-finite input to a baseline step")


def sgd_step(w, grad, eta, t):
    """OGD with the decaying rate eta / sqrt(t)."""
    if t < 1:
        raise ConfigError("t must be >= 1")
    _finite(grad)
    return w - (eta / math.sqrt(t)) * grad


def ogd_perdim_step(w, grad, eta_per_dim):
    w, grad, eta = np.asarray(w, float), np.asarray(grad, float), np.asarray(eta_per_dim, float)
    if not (w.shape[0] == grad.shape[0] == eta.shape[0]):
        raise DimensionError("w, grad and per-dimension rates must agree in length")
    _finite(grad)
    if eta.ndim < w.ndim:
        eta = eta.reshape(eta.shape + (1,) * (w.ndim - eta.ndim))
    return w - eta * grad


def adagrad_step(w, grad, eta, accum, delta=STABILITY_DELTA):
    """Diagonal AdaGrad; returns ``(w', accum')``."""
    _finite(grad, accum)
    accum = accum + grad * grad
    return w - eta * grad / (np.sqrt(accum) + delta), accum


def adam_step(w, grad, eta, t, m, v, beta1=ADAM_BETA1, beta2=ADAM_BETA2, delta=STABILITY_DELTA):
    """Bias-corrected Adam; returns ``(w', m', v')``."""
    if t < 1:
        raise ConfigError("t must be >= 1")
    _finite(grad, m, v)
    m = beta1 * m + (1 - beta1) * grad
    v = beta2 * v + (1 - beta2) * grad * grad
    m_hat = m / (1 - beta1 ** t)
    v_hat = v / (1 - beta2 ** t)
    return w - eta * m_hat / (np.sqrt(v_hat) + delta), m, v


class _FixedWeights(OnlineLearner):
    """Learners whose prediction weights do not depend on the current x."""

    def __init__(self, dim, num_outputs=None):
        super().__init__(dim, num_outputs)
        self.w = np.zeros(self.shape)

    def begin_trial(self, x, t=None):
        self._start(x, t)
        self._pending = (x, self.w[x.indices].copy())
        return self.w.copy()

    def feedback(self, g):
        g = self._check_gradient(g)
        x = self._pending[0]
        self._update(x.indices, self._outer(x.values, g))
        self._pending = None

    def _update(self, idx, grad_support):
        raise NotImplementedError

    def score(self, batch):
        vals = batch.values if self.num_outputs is None else batch.values[:, None]
        return batch.row_sums(self.w[batch.indices] * vals)

    def state(self):
        return {"w": self.w.copy()}


def _positive(eta, what="eta"):
    if eta is None or not eta > 0:
        raise ConfigError(f"{what} must be a positive number, got {eta!r}")
    return float(eta)


class SGD(_FixedWeights):
    name = "sgd"

    def __init__(self, dim, eta, num_outputs=None):
        super().__init__(dim, num_outputs)
        self.eta = _positive(eta)

    def _update(self, idx, grad):
        # the gradient vanishes off the support of x, so a sparse update is exact
        self.w[idx] = sgd_step(self.w[idx], grad, self.eta, self.t)


class OGDPerDim(_FixedWeights):
    name = "ogd"

    def __init__(self, dim, rates: Sequence[float], num_outputs=None):
        super().__init__(dim, num_outputs)
        rates = np.asarray(rates, dtype=np.float64)
        if rates.shape != (dim,):
            raise ConfigError(f"need {dim} per-dimension rates, got shape {rates.shape}")
        if np.any(rates < 0) or not np.all(np.isfinite(rates)):
            raise ConfigError("per-dimension rates must be finite and nonnegative")
        self.rates = rates

    def _update(self, idx, grad):
        self.w[idx] = ogd_perdim_step(self.w[idx], grad, self.rates[idx])


class AdaGrad(_FixedWeights):
    name = "adagrad"

    def __init__(self, dim, eta, delta=STABILITY_DELTA, num_outputs=None):
        super().__init__(dim, num_outputs)
        self.eta = _positive(eta)
        self.delta = _positive(delta, "stability delta")
        self.accum = np.zeros(self.shape)

    def _update(self, idx, grad):
        self.w[idx], self.accum[idx] = adagrad_step(
            self.w[idx], grad, self.eta, self.accum[idx], self.delta)

    def state(self):
        return {"w": self.w.copy(), "accum": self.accum.copy()}


class Adam(_FixedWeights):
    name = "adam"

    def __init__(self, dim, eta, beta1=ADAM_BETA1, beta2=ADAM_BETA2, delta=STABILITY_DELTA,
                 num_outputs=None):
        super().__init__(dim, num_outputs)
        self.eta = _positive(eta)
        if not (0 <= beta1 < 1 and 0 <= beta2 < 1):
            raise ConfigError("Adam decay rates must lie in [0, 1)")
        self.beta1, self.beta2 = float(beta1), float(beta2)
        self.delta = _positive(delta, "stability delta")
        self.m = np.zeros(self.shape)
        self.v = np.zeros(self.shape)

    def _update(self, idx, grad_support):
        # moments decay everywhere, so Adam needs the dense gradient
        grad = np.zeros(self.shape)
        grad[idx] = grad_support
        self.w, self.m, self.v = adam_step(
            self.w, grad, self.eta, self.t, self.m, self.v, self.beta1, self.beta2, self.delta)

    def state(self):
        return {"w": self.w.copy(), "m": self.m.copy(), "v": self.v.copy()}


@dataclass(frozen=True)
class BaselineConfig:
    kind: str = "sgd"
    eta: Optional[float] = None
    rates: Optional[tuple] = None
    adam_beta1: float = ADAM_BETA1
    adam_beta2: float = ADAM_BETA2
    stability_delta: float = STABILITY_DELTA

    def build(self, dim: int, num_outputs: Optional[int] = None) -> OnlineLearner:
        extra = {}
        if self.kind == "adam":
            extra = {"beta1": self.adam_beta1, "beta2": self.adam_beta2,
                     "delta": self.stability_delta}
        elif self.kind == "adagrad":
            extra = {"delta": self.stability_delta}
        return make_baseline(self.kind, dim, self.eta, self.rates, num_outputs, **extra)


def make_baseline(kind: str, dim: int, eta: Optional[float] = None, rates=None,
                  num_outputs: Optional[int] = None, **kwargs) -> OnlineLearner:
    kind = kind.lower()
    if kind == "sgd":
        return SGD(dim, eta, num_outputs=num_outputs)
    if kind == "ogd":
        if rates is None:
            if eta is None:
                raise ConfigError("ogd needs per-dimension rates or a global eta")
            rates = np.full(dim, _positive(eta))
        return OGDPerDim(dim, rates, num_outputs=num_outputs)
    if kind == "adagrad":
        return AdaGrad(dim, eta, num_outputs=num_outputs, **kwargs)
    if kind == "adam":
        return Adam(dim, eta, num_outputs=num_outputs, **kwargs)
    raise ConfigError(f"unknown baseline {kind!r}")
