"""Seeded multi-epoch experiments with periodic test-set evaluation.

Each epoch shuffles the training set with a generator seeded by
``[seed, epoch]`` and makes one online pass. Test metrics use the current
weights without changing them and are logged every ``metric_every`` trials
and again at the end of every epoch.
"""
from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

import numpy as np

from .analysis.history import RunHistory
from .baselines import ADAM_BETA1, ADAM_BETA2, STABILITY_DELTA, make_baseline
from .core import LOSS_NAMES, CrossEntropyLoss, Loss, dot_predict, make_loss
from .data.dataset import Dataset, as_binary, as_classes
from .errors import ConfigError, DimensionError
from .learners import ScInOL1, ScInOL2, online_step

LEARNERS = ("scinol1", "scinol2", "sgd", "ogd", "adagrad", "adam")
METRICS_HEADER = ("step", "epoch", "avg_test_loss", "test_accuracy", "cum_train_loss", "cum_regret")


@dataclass
class ExperimentConfig:
    learner: str = "scinol2"
    loss: str = "logistic"
    epsilon: float = 1.0
    eta: Optional[float] = None
    rates: Optional[List[float]] = None
    epochs: int = 1
    seed: int = 0
    metric_every: int = 50
    record_history: bool = False
    reset_t_per_epoch: bool = False
    adam_beta1: float = ADAM_BETA1
    adam_beta2: float = ADAM_BETA2
    delta: float = STABILITY_DELTA

    def __post_init__(self):
        self.learner = self.learner.lower()
        self.loss = self.loss.replace("-", "_").lower()
        if self.learner not in LEARNERS:
            raise ConfigError(f"unknown learner {self.learner!r}; choose from {LEARNERS}")
        if self.loss not in LOSS_NAMES:
            raise ConfigError(f"unknown loss {self.loss!r}; choose from {LOSS_NAMES}")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.metric_every < 1:
            raise ConfigError("metric_every must be >= 1")
        if self.learner in ("scinol1", "scinol2") and not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if self.learner in ("sgd", "adagrad", "adam") and self.eta is None:
            raise ConfigError(f"{self.learner} needs a learning rate (eta)")
        if self.learner == "ogd" and self.eta is None and self.rates is None:
            raise ConfigError("ogd needs per-dimension rates or eta")

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["rates"] is not None:
            d["rates"] = [float(r) for r in d["rates"]]
        return d

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


@dataclass
class MetricsRow:
    step: int
    epoch: int
    avg_test_loss: float
    test_accuracy: float
    cum_train_loss: float
    cum_regret: Optional[float] = None

    def cells(self):
        regret = "" if self.cum_regret is None else repr(self.cum_regret)
        return [str(self.step), str(self.epoch), repr(self.avg_test_loss),
                repr(self.test_accuracy), repr(self.cum_train_loss), regret]


def make_learner(cfg: ExperimentConfig, dim: int, num_outputs: Optional[int] = None):
    if cfg.learner == "scinol1":
        return ScInOL1(dim, cfg.epsilon, num_outputs)
    if cfg.learner == "scinol2":
        return ScInOL2(dim, cfg.epsilon, num_outputs)
    extra = {}
    if cfg.learner == "adam":
        extra = {"beta1": cfg.adam_beta1, "beta2": cfg.adam_beta2, "delta": cfg.delta}
    elif cfg.learner == "adagrad":
        extra = {"delta": cfg.delta}
    return make_baseline(cfg.learner, dim, cfg.eta, cfg.rates, num_outputs, **extra)


def prepare(cfg: ExperimentConfig, train: Dataset, test: Dataset):
    """Check compatibility and return ``(loss, train, test, num_outputs)``.

    Cross-entropy routes to the multivariate learners; other losses use the
    univariate ones. Everything here runs before the first trial.
    """
    if test.dim != train.dim:
        raise DimensionError(f"train has dim {train.dim}, test has dim {test.dim}")
    if cfg.loss == "cross_entropy":
        train, test = as_classes(train), as_classes(test)
        k = max(train.num_classes or 0, test.num_classes or 0)
        if k < 1:
            raise ConfigError("cross-entropy needs class labels")
        train = Dataset(train.examples, train.dim, k, train.provenance)
        test = Dataset(test.examples, test.dim, k, test.provenance)
        return CrossEntropyLoss(k), train, test, k
    loss = make_loss(cfg.loss)
    if cfg.loss in ("logistic", "hinge"):
        train, test = as_binary(train), as_binary(test)
    elif "class" in (train.label_kind, test.label_kind):
        raise ConfigError("absolute loss needs real or binary targets")
    return loss, train, test, None


def evaluate(learner, loss: Loss, test: Dataset):
    """Average test loss and accuracy under the learner's current state."""
    if len(test) == 0:
        return float("nan"), float("nan")
    preds = learner.score(test.batch)
    return (float(np.mean(loss.value_batch(test.targets, preds))),
            loss.accuracy_batch(test.targets, preds))


def _comparator_term(u, rec, multi):
    """g_t x_t^T (w_t - u) for one trial."""
    pu = dot_predict(u, rec.x)
    if multi:
        return float(np.asarray(rec.g) @ (np.asarray(rec.yhat) - pu))
    return float(rec.g) * (float(rec.yhat) - pu)


def run_experiment(cfg: ExperimentConfig, train: Dataset, test: Dataset, u=None):
    """Train online and return ``(metrics, history)``; history is None unless
    ``cfg.record_history`` is set."""
    loss, train, test, K = prepare(cfg, train, test)
    learner = make_learner(cfg, train.dim, K)
    if u is not None:
        u = np.asarray(u, dtype=np.float64)
        if u.shape != learner.shape:
            raise DimensionError(f"comparator shape {u.shape} != learner shape {learner.shape}")
    hist = None
    if cfg.record_history:
        hist = RunHistory(cfg.learner, train.dim,
                          cfg.epsilon if cfg.learner.startswith("scinol") else None,
                          K, config=cfg.to_dict())
    metrics: List[MetricsRow] = []
    n = len(train)
    if n == 0:
        return metrics, hist

    step = 0
    cum_loss = 0.0
    cum_regret = 0.0 if u is not None else None
    for epoch in range(1, cfg.epochs + 1):
        order = np.random.default_rng([cfg.seed, epoch]).permutation(n)
        for pos, i in enumerate(order, start=1):
            ex = train.examples[i]
            t = pos if cfg.reset_t_per_epoch else None
            rec = online_step(learner, ex, loss, t)
            step += 1
            cum_loss += loss.value(ex.y, rec.yhat)
            if u is not None:
                cum_regret += _comparator_term(u, rec, K is not None)
            if hist is not None:
                hist.records.append(rec)
            if step % cfg.metric_every == 0 or pos == n:
                avg, acc = evaluate(learner, loss, test)
                metrics.append(MetricsRow(step, epoch, avg, acc, cum_loss, cum_regret))
    if hist is not None:
        hist.terminal = dict(learner.state(), exp_clamps=getattr(learner, "exp_clamps", 0))
    return metrics, hist


def run_eta_grid(cfg: ExperimentConfig, etas: Sequence[float], train, test, u=None):
    """One run per eta; every run is returned, no selection is made."""
    out = []
    for eta in etas:
        c = ExperimentConfig(**dict(cfg.to_dict(), eta=float(eta)))
        out.append((c, *run_experiment(c, train, test, u)))
    return out


def write_metrics(rows: Sequence[MetricsRow], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(METRICS_HEADER)
    for r in rows:
        writer.writerow(r.cells())


def save_metrics(rows: Sequence[MetricsRow], path) -> None:
    with open(path, "w") as fh:
        write_metrics(rows, fh)


def zero_model_loss(loss_name: str, num_classes: int = 2) -> float:
    """Test loss of the all-zero predictor: ln 2 for logistic, ln K for cross-entropy."""
    if loss_name == "logistic":
        return math.log(2.0)
    if loss_name == "cross_entropy":
        return math.log(num_classes)
    if loss_name == "hinge":
        return 1.0
    raise ConfigError(f"no fixed zero-model loss for {loss_name}")
