"""Immutable datasets plus the transforms applied to them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from ..core import BinaryLabel, ClassLabel, FeatureVector, LabeledExample, RealLabel, SparseBatch
from ..errors import ConfigError, DimensionError, DomainError


@dataclass(frozen=True)
class Dataset:
    """A sequence of labeled examples sharing one dimension.

    ``num_classes`` is 2 for binary labels, K for class labels and None for
    real-valued targets.
    """

    examples: Tuple[LabeledExample, ...]
    dim: int
    num_classes: Optional[int] = None
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "examples", tuple(self.examples))
        for ex in self.examples:
            if ex.x.dim != self.dim:
                raise DimensionError(f"example of dim {ex.x.dim} in a dim-{self.dim} dataset")
            if isinstance(ex.y, ClassLabel) and (self.num_classes is None or ex.y.k >= self.num_classes):
                raise DimensionError(f"class {ex.y.k} outside num_classes={self.num_classes}")

    def __len__(self):
        return len(self.examples)

    def __iter__(self):
        return iter(self.examples)

    def __getitem__(self, i):
        return self.examples[i]

    @property
    def label_kind(self) -> str:
        if not self.examples:
            return "empty"
        y = self.examples[0].y
        return {BinaryLabel: "binary", ClassLabel: "class", RealLabel: "real"}[type(y)]

    @cached_property
    def batch(self) -> SparseBatch:
        return SparseBatch.from_vectors([ex.x for ex in self.examples], self.dim)

    @cached_property
    def targets(self) -> np.ndarray:
        if self.label_kind == "class":
            return np.array([ex.y.k for ex in self.examples], dtype=np.int64)
        return np.array([ex.y.target for ex in self.examples], dtype=np.float64)

    def subset(self, order: Sequence[int]) -> "Dataset":
        return Dataset(tuple(self.examples[i] for i in order), self.dim, self.num_classes,
                       dict(self.provenance))

    def with_examples(self, examples, **provenance) -> "Dataset":
        return Dataset(tuple(examples), self.dim, self.num_classes,
                       dict(self.provenance, **provenance))


def infer_labels(raw: Sequence[float], kind: str = "auto", num_classes: Optional[int] = None):
    """Turn raw numeric labels into label objects.

    ``auto`` picks binary when every label is +-1, class labels when every
    label is a nonnegative integer, and real targets otherwise.
    """
    raw = [float(r) for r in raw]
    if kind == "auto":
        if raw and all(r in (1.0, -1.0) for r in raw):
            kind = "binary"
        elif raw and all(r >= 0 and r.is_integer() for r in raw):
            kind = "class"
        else:
            kind = "real"
    if kind == "binary":
        return [BinaryLabel(int(r)) for r in raw], 2
    if kind == "class":
        if not all(r >= 0 and r.is_integer() for r in raw):
            raise ConfigError("class labels must be nonnegative integers")
        k = max((int(r) for r in raw), default=-1) + 1
        return [ClassLabel(int(r)) for r in raw], max(k, num_classes or 0)
    if kind == "real":
        return [RealLabel(r) for r in raw], None
    raise ConfigError(f"unknown label kind {kind!r}")


def as_binary(ds: Dataset) -> Dataset:
    """Binary view of a dataset; two-class labels map 0 -> -1 and 1 -> +1."""
    if ds.label_kind in ("binary", "empty"):
        return ds
    if ds.label_kind == "class" and ds.num_classes <= 2:
        ex = [LabeledExample(e.x, BinaryLabel(1 if e.y.k == 1 else -1)) for e in ds]
        return Dataset(tuple(ex), ds.dim, 2, dict(ds.provenance))
    raise ConfigError(f"{ds.label_kind} labels ({ds.num_classes} classes) are not binary")


def as_classes(ds: Dataset) -> Dataset:
    """Class-index view; binary labels map -1 -> 0 and +1 -> 1."""
    if ds.label_kind in ("class", "empty"):
        return ds
    if ds.label_kind == "binary":
        ex = [LabeledExample(e.x, ClassLabel(1 if e.y.y == 1 else 0)) for e in ds]
        return Dataset(tuple(ex), ds.dim, 2, dict(ds.provenance))
    raise ConfigError("real-valued targets cannot be used as classes")


@dataclass(frozen=True)
class ScalingTransform:
    """Diagonal rescaling x_i -> a_i x_i with every a_i > 0."""

    factors: np.ndarray

    def __post_init__(self):
        f = np.array(self.factors, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(f)) or np.any(f <= 0):
            raise DomainError("scaling factors must be positive and finite")
        f.setflags(write=False)
        object.__setattr__(self, "factors", f)

    def inverse(self) -> "ScalingTransform":
        return ScalingTransform(1.0 / self.factors)


def apply_scaling(ds: Dataset, s) -> Dataset:
    if not isinstance(s, ScalingTransform):
        s = ScalingTransform(s)
    if s.factors.size != ds.dim:
        raise DimensionError(f"{s.factors.size} factors for a dim-{ds.dim} dataset")
    ex = [LabeledExample(e.x.scaled(s.factors), e.y) for e in ds]
    return Dataset(tuple(ex), ds.dim, ds.num_classes, dict(ds.provenance))


def shuffle_split(ds: Dataset, seed: int, train_fraction: float = 2 / 3):
    """Seeded random split; the training part has ceil(n * fraction) examples."""
    if not 0 < train_fraction < 1:
        raise DomainError("train_fraction must lie strictly between 0 and 1")
    n = len(ds)
    perm = np.random.default_rng(seed).permutation(n)
    # round first so that e.g. 3 * (2/3) is not pushed past 2 by rounding error
    n_train = math.ceil(round(n * train_fraction, 9))
    return ds.subset(perm[:n_train]), ds.subset(perm[n_train:])


def dataset_stats(ds: Dataset) -> dict:
    """Features, records, classes, and the ratio of the largest to the smallest
    positive column L2 norm."""
    b = ds.batch
    sq = np.bincount(b.indices, weights=b.values * b.values, minlength=ds.dim)
    norms = np.sqrt(sq[sq > 0])
    scale = float(norms.max() / norms.min()) if norms.size else float("nan")
    return {"features": ds.dim, "records": len(ds), "classes": ds.num_classes, "scale": scale}
