"""Feature vectors, labels and the 1-Lipschitz losses used throughout.

Feature vectors are sparse: sorted ``(index, value)`` pairs backed by two
read-only numpy arrays. Weights are always dense.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from .errors import DimensionError, LabelMismatchError, NonFiniteError


class FeatureVector:
    """Immutable sparse vector in R^dim.

    Absent indices are zero. Explicit zeros are allowed but carry no
    information; the learners treat them exactly like absent entries.
    """

    __slots__ = ("dim", "indices", "values")

    def __init__(self, dim: int, indices, values):
        dim = int(dim)
        if dim < 1:
            raise DimensionError(f"dim must be positive, got {dim}")
        idx = np.array(indices, dtype=np.int64).reshape(-1)
        val = np.array(values, dtype=np.float64).reshape(-1)
        if idx.shape != val.shape:
            raise DimensionError("indices and values differ in length")
        if idx.size:
            if idx[0] < 0 or idx[-1] >= dim:
                raise DimensionError(f"index out of range [0, {dim})")
            if np.any(np.diff(idx) <= 0):
                raise DimensionError("indices must be strictly increasing")
        if not np.all(np.isfinite(val)):
            raise NonFiniteError("feature values must be finite")
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    def __setattr__(self, name, value):
        raise AttributeError("FeatureVector is immutable")

    @classmethod
    def from_dense(cls, dense: Sequence[float]) -> "FeatureVector":
        arr = np.asarray(dense, dtype=np.float64).reshape(-1)
        nz = np.flatnonzero(arr)
        return cls(arr.size, nz, arr[nz])

    @classmethod
    def from_dict(cls, dim: int, entries: Mapping[int, float]) -> "FeatureVector":
        keys = sorted(entries)
        return cls(dim, keys, [entries[k] for k in keys])

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def to_dict(self) -> dict:
        return {int(i): float(v) for i, v in zip(self.indices, self.values)}

    def scaled(self, factors: np.ndarray) -> "FeatureVector":
        return FeatureVector(self.dim, self.indices, self.values * factors[self.indices])

    def __eq__(self, other):
        if not isinstance(other, FeatureVector):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def __repr__(self):
        return f"FeatureVector(dim={self.dim}, {self.to_dict()})"


@dataclass(frozen=True)
class BinaryLabel:
    y: int

    def __post_init__(self):
        if self.y not in (1, -1):
            raise LabelMismatchError(f"binary label must be +1 or -1, got {self.y!r}")

    @property
    def target(self) -> float:
        return float(self.y)


@dataclass(frozen=True)
class RealLabel:
    y: float

    def __post_init__(self):
        if not math.isfinite(self.y):
            raise NonFiniteError("real label must be finite")

    @property
    def target(self) -> float:
        return float(self.y)


@dataclass(frozen=True)
class ClassLabel:
    k: int

    def __post_init__(self):
        if self.k < 0:
            raise LabelMismatchError(f"class index must be nonnegative, got {self.k}")

    @property
    def target(self) -> int:
        return int(self.k)


Label = Union[BinaryLabel, RealLabel, ClassLabel]
Prediction = Union[float, np.ndarray]


@dataclass(frozen=True)
class LabeledExample:
    x: FeatureVector
    y: Label


def dot_predict(w, x: FeatureVector) -> float:
    """x^T w using only the stored entries of ``x``."""
    w = np.asarray(w, dtype=np.float64)
    if w.shape[0] != x.dim:
        raise DimensionError(f"weights have length {w.shape[0]}, vector has dim {x.dim}")
    if w.ndim == 1:
        return float(np.dot(w[x.indices], x.values))
    # d x K weight matrix: columnwise prediction W^T x
    return x.values @ w[x.indices]


# ---------------------------------------------------------------------------
# losses
# ---------------------------------------------------------------------------


def _check_scalar(yhat) -> float:
    if isinstance(yhat, np.ndarray) and yhat.ndim > 0:
        raise LabelMismatchError("scalar loss received a vector prediction")
    yhat = float(yhat)
    if math.isnan(yhat):
        raise NonFiniteError("prediction is NaN")
    return yhat


def _sgn(z: float) -> float:
    return (z > 0) - (z < 0)


class Loss:
    """A convex loss with |subgradient| <= 1 in the max-norm."""

    name: str = ""
    num_outputs: int = 1
    label_types: tuple = ()

    def _target(self, y):
        if not isinstance(y, self.label_types):
            raise LabelMismatchError(f"{self.name} loss cannot take {type(y).__name__}")
        return y.target

    def value(self, y: Label, yhat: Prediction) -> float:
        raise NotImplementedError

    def subgradient(self, y: Label, yhat: Prediction):
        raise NotImplementedError

    def value_batch(self, targets: np.ndarray, preds: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def accuracy_batch(self, targets: np.ndarray, preds: np.ndarray) -> float:
        return float(np.mean(np.where(preds > 0, 1.0, -1.0) == targets))

    def __repr__(self):
        return f"{type(self).__name__}()"

    def __eq__(self, other):
        return type(self) is type(other) and self.num_outputs == other.num_outputs

    def __hash__(self):
        return hash((type(self), self.num_outputs))


class LogisticLoss(Loss):
    name = "logistic"
    label_types = (BinaryLabel,)

    def value(self, y, yhat):
        m = self._target(y) * _check_scalar(yhat)
        # softplus(-m) without overflow
        if m > 0:
            return math.log1p(math.exp(-m))
        return -m + math.log1p(math.exp(m))

    def subgradient(self, y, yhat):
        yv = self._target(y)
        m = yv * _check_scalar(yhat)
        if m >= 0:
            e = math.exp(-m)
            return -yv * e / (1.0 + e)
        return -yv / (1.0 + math.exp(m))

    def value_batch(self, targets, preds):
        return np.logaddexp(0.0, -targets * preds)


class HingeLoss(Loss):
    name = "hinge"
    label_types = (BinaryLabel,)

    def value(self, y, yhat):
        return max(0.0, 1.0 - self._target(y) * _check_scalar(yhat))

    def subgradient(self, y, yhat):
        yv = self._target(y)
        return -yv if yv * _check_scalar(yhat) <= 1.0 else 0.0

    def value_batch(self, targets, preds):
        return np.maximum(0.0, 1.0 - targets * preds)


class AbsoluteLoss(Loss):
    """|yhat - y|; binary labels are accepted as the reals +-1."""

    name = "absolute"
    label_types = (RealLabel, BinaryLabel)

    def value(self, y, yhat):
        return abs(_check_scalar(yhat) - self._target(y))

    def subgradient(self, y, yhat):
        return float(_sgn(_check_scalar(yhat) - self._target(y)))

    def value_batch(self, targets, preds):
        return np.abs(preds - targets)


class CrossEntropyLoss(Loss):
    """Multinomial logistic loss -yhat_y + log sum_k exp(yhat_k)."""

    name = "cross_entropy"
    label_types = (ClassLabel,)

    def __init__(self, num_classes: int):
        if num_classes < 1:
            raise LabelMismatchError("cross-entropy needs at least one class")
        self.num_outputs = int(num_classes)

    def __repr__(self):
        return f"CrossEntropyLoss({self.num_outputs})"

    def _vector(self, y, yhat):
        k = self._target(y)
        if k >= self.num_outputs:
            raise LabelMismatchError(f"class {k} out of range for K={self.num_outputs}")
        z = np.asarray(yhat, dtype=np.float64)
        if z.shape != (self.num_outputs,):
            raise LabelMismatchError(f"expected a prediction vector of length {self.num_outputs}")
        if np.any(np.isnan(z)):
            raise NonFiniteError("prediction is NaN")
        return k, z

    def value(self, y, yhat):
        k, z = self._vector(y, yhat)
        zmax = z.max()
        return float(zmax + math.log(np.sum(np.exp(z - zmax))) - z[k])

    def subgradient(self, y, yhat):
        k, z = self._vector(y, yhat)
        e = np.exp(z - z.max())
        g = e / e.sum()
        g[k] -= 1.0
        return g

    def value_batch(self, targets, preds):
        zmax = preds.max(axis=1)
        lse = zmax + np.log(np.sum(np.exp(preds - zmax[:, None]), axis=1))
        return lse - preds[np.arange(preds.shape[0]), targets]

    def accuracy_batch(self, targets, preds):
        return float(np.mean(np.argmax(preds, axis=1) == targets))


LOSS_NAMES = ("logistic", "hinge", "absolute", "cross_entropy")


def make_loss(name: str, num_classes: Optional[int] = None) -> Loss:
    name = name.replace("-", "_")
    if name == "logistic":
        return LogisticLoss()
    if name == "hinge":
        return HingeLoss()
    if name == "absolute":
        return AbsoluteLoss()
    if name in ("cross_entropy", "crossentropy"):
        if num_classes is None:
            raise LabelMismatchError("cross-entropy needs num_classes")
        return CrossEntropyLoss(num_classes)
    raise ValueError(f"unknown loss {name!r}; expected one of {LOSS_NAMES}")


def loss_value(loss: Loss, y: Label, yhat: Prediction) -> float:
    return loss.value(y, yhat)


def loss_subgradient(loss: Loss, y: Label, yhat: Prediction):
    return loss.subgradient(y, yhat)


class SparseBatch:
    """Row-compressed block of feature vectors, used for vectorised scoring."""

    __slots__ = ("dim", "indptr", "indices", "values", "rows")

    def __init__(self, dim: int, indptr, indices, values):
        self.dim = int(dim)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.values = np.asarray(values, dtype=np.float64)
        counts = np.diff(self.indptr)
        self.rows = np.repeat(np.arange(counts.size), counts)

    @classmethod
    def from_vectors(cls, vectors: Sequence[FeatureVector], dim: Optional[int] = None):
        if dim is None:
            dim = vectors[0].dim if vectors else 1
        indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([v.nnz for v in vectors])
        if vectors:
            indices = np.concatenate([v.indices for v in vectors])
            values = np.concatenate([v.values for v in vectors])
        else:
            indices = np.zeros(0, dtype=np.int64)
            values = np.zeros(0)
        return cls(dim, indptr, indices, values)

    @property
    def n_rows(self) -> int:
        return int(self.indptr.size - 1)

    def row_sums(self, contributions: np.ndarray) -> np.ndarray:
        """Sum per-nonzero contributions (nnz,) or (nnz, K) into rows."""
        n = self.n_rows
        if contributions.ndim == 1:
            return np.bincount(self.rows, weights=contributions, minlength=n)
        return np.stack(
            [np.bincount(self.rows, weights=contributions[:, k], minlength=n)
             for k in range(contributions.shape[1])],
            axis=1,
        )
