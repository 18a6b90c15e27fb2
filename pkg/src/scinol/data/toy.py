"""The synthetic toy problem with feature scales spanning 2^-10 .. 2^10.

Randomness comes from numpy's PCG64 generator. A ``SeedSequence(seed)`` is
split with ``spawn(3)`` into one child stream per purpose, in this order:

0. signs of the generating comparator u,
1. feature values (all training rows, then all test rows),
2. the uniforms deciding the labels.

Gaussians are numpy's ``standard_normal`` (ziggurat) scaled by sigma_i.
Labels are +1 when the uniform draw is below sigmoid(x^T u), else -1.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..core import BinaryLabel, FeatureVector, LabeledExample
from ..errors import ConfigError
from .dataset import Dataset
from .formats import save_dataset


@dataclass(frozen=True)
class ToySpec:
    d: int = 21
    n_train: int = 5000
    n_test: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.n_train < 1 or self.n_test < 1:
            raise ConfigError("toy spec needs d, n_train and n_test all >= 1")

    @property
    def sigma(self) -> np.ndarray:
        """2^(i - 11) for i = 1..21; centred the same way for other d."""
        return 2.0 ** (np.arange(1, self.d + 1) - (self.d + 1) // 2)


def _rows(X, y, spec, part):
    ex = tuple(LabeledExample(FeatureVector.from_dense(row), BinaryLabel(int(lab)))
               for row, lab in zip(X, y))
    return Dataset(ex, spec.d, 2, {"toy": asdict(spec), "part": part})


def gen_toy_arrays(spec: ToySpec):
    """Dense ``(X_train, y_train, X_test, y_test, u)`` for ``spec``."""
    sign_ss, feat_ss, label_ss = np.random.SeedSequence(spec.seed).spawn(3)
    sigma = spec.sigma
    u = np.random.default_rng(sign_ss).choice([-1.0, 1.0], size=spec.d) / sigma
    n = spec.n_train + spec.n_test
    X = np.random.default_rng(feat_ss).standard_normal((n, spec.d)) * sigma
    p = 1.0 / (1.0 + np.exp(-(X @ u)))
    y = np.where(np.random.default_rng(label_ss).random(n) < p, 1, -1)
    k = spec.n_train
    return X[:k], y[:k], X[k:], y[k:], u


def gen_toy(spec: ToySpec):
    """Training set, test set and the generating comparator u."""
    Xtr, ytr, Xte, yte, u = gen_toy_arrays(spec)
    return _rows(Xtr, ytr, spec, "train"), _rows(Xte, yte, spec, "test"), u


def write_toy(spec: ToySpec, out_dir, prefix: str = "toy"):
    """Write ``<prefix>_train.csv``, ``<prefix>_test.csv`` and ``<prefix>.json``
    (the ToySpec fields plus the generating u). Returns the three paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    train, test, u = gen_toy(spec)
    paths = out / f"{prefix}_train.csv", out / f"{prefix}_test.csv", out / f"{prefix}.json"
    save_dataset(train, paths[0])
    save_dataset(test, paths[1])
    with open(paths[2], "w") as fh:
        json.dump({"spec": asdict(spec), "sigma": spec.sigma.tolist(), "u": u.tolist()}, fh, indent=2)
    return paths
