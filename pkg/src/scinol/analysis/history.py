"""Recorded trajectories of an online run and their JSON form."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..core import BinaryLabel, ClassLabel, FeatureVector, RealLabel
from ..learners import TrialRecord

_LABEL_KINDS = {BinaryLabel: "binary", RealLabel: "real", ClassLabel: "class"}
_LABEL_TYPES = {v: k for k, v in _LABEL_KINDS.items()}


@dataclass
class RunHistory:
    learner: str
    dim: int
    epsilon: Optional[float] = None
    num_outputs: Optional[int] = None
    records: List[TrialRecord] = field(default_factory=list)
    terminal: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    # folded statistics, keyed by the number of records they were computed from
    _fold: Optional[tuple] = field(default=None, init=False, repr=False, compare=False)
    _tau: Optional[tuple] = field(default=None, init=False, repr=False, compare=False)

    @property
    def T(self) -> int:
        return len(self.records)

    @property
    def cell_shape(self):
        return (self.dim,) if self.num_outputs is None else (self.dim, self.num_outputs)

    def support_weights(self, rec: TrialRecord) -> np.ndarray:
        return np.asarray(rec.w, dtype=np.float64).reshape((rec.x.nnz,) + self.cell_shape[1:])

    def gradient(self, rec: TrialRecord) -> np.ndarray:
        """Per-trial gradient as a length-K array (K=1 for univariate runs)."""
        return np.atleast_1d(np.asarray(rec.g, dtype=np.float64))

    def tau(self):
        """First trial (1-based) with a nonzero value per feature, 0 if none, and that value."""
        if self._tau is not None and self._tau[0] == len(self.records):
            return self._tau[1].copy(), self._tau[2].copy()
        tau = np.zeros(self.dim, dtype=np.int64)
        x_tau = np.zeros(self.dim)
        for n, rec in enumerate(self.records, start=1):
            nz = rec.x.values != 0
            idx = rec.x.indices[nz]
            fresh = tau[idx] == 0
            tau[idx[fresh]] = n
            x_tau[idx[fresh]] = rec.x.values[nz][fresh]
        self._tau = (len(self.records), tau, x_tau)
        return tau.copy(), x_tau.copy()

    def folded_stats(self) -> dict:
        """M, G, S2 recomputed from the records alone, plus ``gxw`` = sum_t g_t x_t^T w_t.

        The result is cached until records are appended.
        """
        if self._fold is not None and self._fold[0] == len(self.records):
            return {k: np.copy(v) for k, v in self._fold[1].items()}
        K = self.num_outputs or 1
        M = np.zeros(self.dim)
        G = np.zeros((self.dim, K))
        S2 = np.zeros((self.dim, K))
        gxw = 0.0
        for rec in self.records:
            idx, xv = rec.x.indices, rec.x.values
            g = self.gradient(rec)
            M[idx] = np.maximum(M[idx], np.abs(xv))
            gx = np.multiply.outer(xv, g)
            G[idx] -= gx
            S2[idx] += gx * gx
            w = self.support_weights(rec).reshape(rec.x.nnz, K)
            gxw += float(np.sum(gx * w))
        if self.num_outputs is None:
            G, S2 = G[:, 0], S2[:, 0]
        out = {"M": M, "G": G, "S2": S2, "gxw": np.float64(gxw)}
        self._fold = (len(self.records), out)
        return {k: np.copy(v) for k, v in out.items()}

    def s_hat(self) -> np.ndarray:
        st = self.folded_stats()
        M = st["M"] if self.num_outputs is None else st["M"][:, None]
        return np.sqrt(st["S2"] + M * M)

    # -- serialisation -----------------------------------------------------

    def to_json(self) -> dict:
        kind = None
        trials = []
        for rec in self.records:
            w = self.support_weights(rec)
            keep = np.any(w.reshape(rec.x.nnz, -1) != 0, axis=1)
            entry = {
                "t": int(rec.t),
                "x": {"indices": rec.x.indices.tolist(), "values": rec.x.values.tolist()},
                "w": {"indices": rec.x.indices[keep].tolist(), "values": w[keep].tolist()},
                "yhat": np.asarray(rec.yhat, dtype=float).tolist(),
                "g": np.asarray(rec.g, dtype=float).tolist(),
            }
            if rec.y is not None:
                kind = _LABEL_KINDS[type(rec.y)]
                entry["y"] = rec.y.target
            trials.append(entry)
        return {
            "config": dict(self.config, learner=self.learner, dim=self.dim,
                           epsilon=self.epsilon, num_outputs=self.num_outputs,
                           label_kind=kind),
            "trials": trials,
            "terminal_stats": {k: np.asarray(v).tolist() for k, v in self.terminal.items()},
        }

    @classmethod
    def from_json(cls, doc: dict) -> "RunHistory":
        cfg = dict(doc["config"])
        learner = cfg.pop("learner")
        dim = int(cfg.pop("dim"))
        epsilon = cfg.pop("epsilon", None)
        K = cfg.pop("num_outputs", None)
        label_type = _LABEL_TYPES.get(cfg.pop("label_kind", None))
        hist = cls(learner, dim, epsilon, K, config=cfg)
        cell = () if K is None else (K,)
        for tr in doc["trials"]:
            x = FeatureVector(dim, tr["x"]["indices"], tr["x"]["values"])
            w = np.zeros((x.nnz,) + cell)
            pos = np.searchsorted(x.indices, tr["w"]["indices"])
            if len(pos):
                w[pos] = np.asarray(tr["w"]["values"], dtype=float).reshape((len(pos),) + cell)
            yhat = tr["yhat"] if K is None else np.asarray(tr["yhat"], dtype=float)
            g = tr["g"] if K is None else np.asarray(tr["g"], dtype=float)
            y = label_type(tr["y"]) if label_type is not None and "y" in tr else None
            hist.records.append(TrialRecord(int(tr["t"]), x, w, yhat, g, y))
        hist.terminal = {k: np.asarray(v, dtype=float) for k, v in doc.get("terminal_stats", {}).items()}
        return hist

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    def save(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())

    @classmethod
    def load(cls, path) -> "RunHistory":
        with open(path) as fh:
            return cls.from_json(json.load(fh))
