"""Scale-invariant online learners ScInOL1 and ScInOL2.

Both learners keep, per coordinate, the maximum absolute input ``M``, the
negative cumulative gradient ``G`` and the sum of squared gradients ``S2``.
ScInOL1 additionally keeps a nonincreasing scale ``beta``; ScInOL2 keeps the
epsilon-shifted cumulative reward ``eta``.

Every learner follows a two-phase protocol per trial::

    w = learner.begin_trial(x)      # commits M_t (and beta_t) from x first
    yhat = dot_predict(w, x)
    learner.feedback(g)             # g = d loss / d yhat, |g| <= 1

Passing ``num_outputs=K`` switches to the multivariate form: ``G``, ``S2``
and ``beta``/``eta`` become d x K grids while ``M`` stays shared per feature.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import CrossEntropyLoss, FeatureVector, LabeledExample, Loss, SparseBatch, dot_predict
from .errors import ConfigError, DimensionError, LipschitzError, NonFiniteError, ProtocolError

EXP_CLAMP = 700.0
LIPSCHITZ_SLACK = 1e-12


@dataclass
class TrialRecord:
    """One trial: weights are stored on the support of ``x`` only."""

    t: int
    x: FeatureVector
    w: np.ndarray
    yhat: Union[float, np.ndarray]
    g: Union[float, np.ndarray]
    y: Optional[object] = None


class OnlineLearner:
    """Common begin_trial / feedback state machine."""

    name = "learner"

    def __init__(self, dim: int, num_outputs: Optional[int] = None):
        if dim < 1:
            raise ConfigError(f"dim must be >= 1, got {dim}")
        if num_outputs is not None and num_outputs < 1:
            raise ConfigError(f"num_outputs must be >= 1, got {num_outputs}")
        self.dim = int(dim)
        self.num_outputs = num_outputs
        self.t = 0
        self._pending = None

    @property
    def shape(self):
        return (self.dim,) if self.num_outputs is None else (self.dim, self.num_outputs)

    def _start(self, x: FeatureVector, t: Optional[int]) -> int:
        if self._pending is not None:
            raise ProtocolError("begin_trial called twice without feedback")
        if x.dim != self.dim:
            raise DimensionError(f"learner has dim {self.dim}, vector has dim {x.dim}")
        t = self.t + 1 if t is None else int(t)
        if t < 1:
            raise ProtocolError(f"trial index must be >= 1, got {t}")
        self.t = t
        return t

    def _check_gradient(self, g):
        if self._pending is None:
            raise ProtocolError("feedback called without a matching begin_trial")
        if self.num_outputs is None:
            g = float(np.asarray(g).reshape(()))
        else:
            g = np.asarray(g, dtype=np.float64).reshape(-1)
            if g.shape != (self.num_outputs,):
                raise DimensionError(f"expected {self.num_outputs} gradient components")
        if not np.all(np.isfinite(g)):
            raise NonFiniteError("gradient must be finite")
        if np.max(np.abs(g)) > 1.0 + LIPSCHITZ_SLACK:
            raise LipschitzError(f"|g| must be <= 1, got {g}")
        return g

    def _outer(self, xv: np.ndarray, g):
        return g * xv if self.num_outputs is None else np.multiply.outer(xv, g)

    def begin_trial(self, x: FeatureVector, t: Optional[int] = None) -> np.ndarray:
        raise NotImplementedError

    def feedback(self, g) -> None:
        raise NotImplementedError

    def score(self, batch: SparseBatch) -> np.ndarray:
        """Predictions the next trial would make on each row, without learning."""
        raise NotImplementedError

    def support_weights(self) -> np.ndarray:
        """Weights of the pending trial on the support of its ``x``."""
        if self._pending is None:
            raise ProtocolError("no trial in progress")
        return self._pending[1]

    def state(self) -> dict:
        raise NotImplementedError


class _ScInOL(OnlineLearner):
    """Shared bookkeeping; subclasses supply the weight formula."""

    def __init__(self, dim: int, epsilon: float = 1.0, num_outputs: Optional[int] = None):
        super().__init__(dim, num_outputs)
        if not epsilon > 0:
            raise ConfigError(f"epsilon must be positive, got {epsilon}")
        self.epsilon = float(epsilon)
        self.M = np.zeros(dim)
        self.G = np.zeros(self.shape)
        self.S2 = np.zeros(self.shape)
        self.exp_clamps = 0

    def _col(self, a: np.ndarray) -> np.ndarray:
        return a if self.num_outputs is None else a[:, None]

    def _weights(self, idx, xv, t, commit):
        raise NotImplementedError

    def begin_trial(self, x, t=None):
        t = self._start(x, t)
        w_s = self._weights(x.indices, x.values, t, commit=True)
        self._pending = (x, w_s)
        w = np.zeros(self.shape)
        w[x.indices] = w_s
        return w

    def feedback(self, g):
        g = self._check_gradient(g)
        x, w_s = self._pending
        idx = x.indices
        gx = self._outer(x.values, g)
        self.G[idx] = self.G[idx] - gx
        self.S2[idx] = self.S2[idx] + gx * gx
        self._after_feedback(idx, gx, w_s)
        self._pending = None

    def _after_feedback(self, idx, gx, w_s):
        pass

    def score(self, batch):
        w = self._weights(batch.indices, batch.values, self.t + 1, commit=False)
        return batch.row_sums(w * self._col(batch.values))

    def state(self):
        return {"M": self.M.copy(), "G": self.G.copy(), "S2": self.S2.copy()}


def _ratio(G, denom):
    theta = np.zeros(np.broadcast(G, denom).shape)
    np.divide(G, denom, out=theta, where=denom > 0)
    return theta


def scinol1_kernel(G, S2, M, beta):
    """ScInOL1 weights from G_{t-1}, S2_{t-1}, M_t and beta_t.

    Returns ``(w, clamped)`` where ``clamped`` counts exponents cut at 700.
    Entries with S2 + M^2 == 0 get weight 0.
    """
    denom = np.sqrt(S2 + M * M)
    theta = _ratio(G, denom)
    half = np.abs(theta) / 2
    over = half > EXP_CLAMP
    clamped = int(np.count_nonzero(over))
    if clamped:
        half = np.minimum(half, EXP_CLAMP)
    w = np.zeros(theta.shape)
    np.divide(beta * np.sign(theta) * np.expm1(half), 2 * denom, out=w, where=denom > 0)
    return w, clamped


def scinol2_kernel(G, S2, M, eta):
    """ScInOL2 weights from G_{t-1}, S2_{t-1}, M_t and eta_{t-1}."""
    denom = np.sqrt(S2 + M * M)
    theta = _ratio(G, denom)
    w = np.zeros(theta.shape)
    np.divide(np.sign(theta) * np.minimum(np.abs(theta), 1.0) * eta, 2 * denom,
              out=w, where=denom > 0)
    return w


def scinol1_beta(beta_prev, S2, M, x, t, epsilon):
    """beta_t = min(beta_{t-1}, eps (S2_{t-1} + M_t^2) / (x_t^2 t)); kept when x_t == 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        cand = epsilon * (S2 + M * M) / (x * x * t)
    return np.where(x != 0, np.minimum(beta_prev, cand), beta_prev)


class ScInOL1(_ScInOL):
    name = "scinol1"

    def __init__(self, dim, epsilon=1.0, num_outputs=None):
        super().__init__(dim, epsilon, num_outputs)
        self.beta = np.full(self.shape, self.epsilon)

    def _weights(self, idx, xv, t, commit):
        M = np.maximum(self.M[idx], np.abs(xv))
        Mc, S2 = self._col(M), self.S2[idx]
        beta = scinol1_beta(self.beta[idx], S2, Mc, self._col(xv), t, self.epsilon)
        w, clamped = scinol1_kernel(self.G[idx], S2, Mc, beta)
        if commit:
            self.M[idx] = M
            self.beta[idx] = beta
            self.exp_clamps += clamped
        return w

    def state(self):
        out = super().state()
        out["beta"] = self.beta.copy()
        return out


class ScInOL2(_ScInOL):
    name = "scinol2"

    def __init__(self, dim, epsilon=1.0, num_outputs=None):
        super().__init__(dim, epsilon, num_outputs)
        self.eta = np.full(self.shape, self.epsilon)

    def _weights(self, idx, xv, t, commit):
        M = np.maximum(self.M[idx], np.abs(xv))
        w = scinol2_kernel(self.G[idx], self.S2[idx], self._col(M), self.eta[idx])
        if commit:
            self.M[idx] = M
        return w

    def _after_feedback(self, idx, gx, w_s):
        self.eta[idx] = self.eta[idx] - gx * w_s

    def state(self):
        out = super().state()
        out["eta"] = self.eta.copy()
        return out


@dataclass(frozen=True)
class LearnerConfig:
    """Constructor arguments for a ScInOL learner; ``num_outputs=None`` is univariate."""

    kind: str = "scinol2"
    epsilon: float = 1.0
    dim: int = 1
    num_outputs: Optional[int] = None

    def build(self) -> _ScInOL:
        cls = {"scinol1": ScInOL1, "scinol2": ScInOL2}.get(self.kind)
        if cls is None:
            raise ConfigError(f"unknown ScInOL variant {self.kind!r}")
        return cls(self.dim, self.epsilon, self.num_outputs)


# Function-style access to the two phases; the learner object is the state.

def _expect(learner, cls):
    if not isinstance(learner, cls):
        raise ConfigError(f"expected a {cls.__name__}, got {type(learner).__name__}")


def scinol1_begin_trial(learner: ScInOL1, x: FeatureVector, t: Optional[int] = None) -> np.ndarray:
    _expect(learner, ScInOL1)
    return learner.begin_trial(x, t)


def scinol1_feedback(learner: ScInOL1, g) -> None:
    _expect(learner, ScInOL1)
    learner.feedback(g)


def scinol2_begin_trial(learner: ScInOL2, x: FeatureVector, t: Optional[int] = None) -> np.ndarray:
    _expect(learner, ScInOL2)
    return learner.begin_trial(x, t)


def scinol2_feedback(learner: ScInOL2, g, w: Optional[np.ndarray] = None) -> None:
    """``w``, if given, must be the dense weights returned by the matching begin_trial."""
    _expect(learner, ScInOL2)
    if w is not None and learner._pending is not None:
        x, w_s = learner._pending
        if not np.array_equal(np.asarray(w)[x.indices], w_s):
            raise ProtocolError("weights passed to feedback differ from the trial's weights")
    learner.feedback(g)


def online_step(learner: OnlineLearner, example: LabeledExample, loss: Loss,
                t: Optional[int] = None) -> TrialRecord:
    """Run one full trial: weights, prediction, subgradient, feedback."""
    vector_loss = isinstance(loss, CrossEntropyLoss)
    if (learner.num_outputs is not None) != vector_loss or (
        vector_loss and learner.num_outputs != loss.num_outputs
    ):
        raise ConfigError(
            f"{loss.name} needs {loss.num_outputs} outputs, learner has {learner.num_outputs}"
        )
    x = example.x
    w = learner.begin_trial(x, t)
    w_s = learner.support_weights()
    yhat = dot_predict(w, x)
    g = loss.subgradient(example.y, yhat)
    learner.feedback(g)
    return TrialRecord(learner.t, x, w_s, yhat, g, example.y)


def multivariate_step(learner: OnlineLearner, example: LabeledExample, loss: Loss,
                      t: Optional[int] = None):
    """Multivariate trial; returns the prediction vector and gradient vector."""
    if learner.num_outputs is None:
        raise ConfigError("multivariate_step needs a learner built with num_outputs")
    rec = online_step(learner, example, loss, t)
    return rec.yhat, rec.g
