"""Numerical verification of the inequalities the regret proofs rest on.

Nothing here is a proof: each check evaluates an inequality on a finite set
of points (a grid, random samples, or every trial of a recorded run) and
reports the largest violation found. A violation is ``lhs - rhs`` divided by
``max(1, scale)``, so it is absolute for small quantities and relative once
they exceed one.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np

from ..errors import DomainError, HistoryMismatchError
from .conjugates import conjugate_oracle_1, conjugate_oracle_2, fenchel_bound_1, fenchel_bound_2
from .history import RunHistory
from .potentials import h_fn

# recorded weights must match the replay to this relative precision
REPLAY_RTOL = 1e-9


@dataclass
class CheckResult:
    check_name: str
    points: int
    max_violation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_violation <= self.tolerance)

    def to_dict(self) -> dict:
        return {"check_name": self.check_name, "points": self.points,
                "max_violation": self.max_violation, "pass": self.passed}

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.check_name}: points={self.points} "
                f"max_violation={self.max_violation:.3e} tol={self.tolerance:.0e}")


def report_json(results: Sequence[CheckResult]) -> str:
    return json.dumps([r.to_dict() for r in results], indent=2)


def report_text(results: Sequence[CheckResult]) -> str:
    return "\n".join(r.line() for r in results)


# ---------------------------------------------------------------------------
# the two (v, q) lemmas
# ---------------------------------------------------------------------------


def _vq(v, q):
    v = np.asarray(v, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if np.any(np.abs(q) > 1) or np.any(np.isnan(q)):
        raise DomainError("q must lie in [-1, 1]")
    return np.broadcast_arrays(v, q)


def _exp_minus_linear(a):
    return np.exp(a) - a


def core_ineq_1_violation(v, q) -> np.ndarray:
    """Pointwise violation of

        (q sgn(v) / 2)(e^{|v|/2} - 1) + e^{a} - a <= e^{|v|/2} - |v|/2 + q^2,
        a = |v - q| / (2 sqrt(1 + q^2)).
    """
    v, q = _vq(v, q)
    a = np.abs(v - q) / (2 * np.sqrt(1 + q * q))
    lhs = q * np.sign(v) / 2 * np.expm1(np.abs(v) / 2) + _exp_minus_linear(a)
    rhs = _exp_minus_linear(np.abs(v) / 2) + q * q
    return (lhs - rhs) / np.maximum(1.0, np.abs(rhs))


def core_ineq_2_violation(v, q) -> np.ndarray:
    """Pointwise violation of

        exp(h((v - q)/sqrt(1 + q^2))/2 - h(v)/2 - q^2/2) <= 1 - q sgn(v) min(|v|, 1) / 2.
    """
    v, q = _vq(v, q)
    lhs = np.exp(0.5 * h_fn((v - q) / np.sqrt(1 + q * q)) - 0.5 * h_fn(v) - 0.5 * q * q)
    rhs = 1 - 0.5 * q * np.sign(v) * np.minimum(np.abs(v), 1.0)
    return lhs - rhs


def check_core_ineq_1(v, q) -> float:
    return float(np.max(core_ineq_1_violation(v, q), initial=-np.inf))


def check_core_ineq_2(v, q) -> float:
    return float(np.max(core_ineq_2_violation(v, q), initial=-np.inf))


def lemma_grid(n_v=100, n_q=100, v_max=20.0):
    """Flattened uniform grid over [-v_max, v_max] x [-1, 1]."""
    vv, qq = np.meshgrid(np.linspace(-v_max, v_max, n_v), np.linspace(-1.0, 1.0, n_q))
    return vv.ravel(), qq.ravel()


def lemma_random(n, rng, v_max=20.0):
    return rng.uniform(-v_max, v_max, n), rng.uniform(-1.0, 1.0, n)


# ---------------------------------------------------------------------------
# replay of recorded runs
# ---------------------------------------------------------------------------


def _sgn(z):
    return (z > 0) - (z < 0)


def _psi1(x, beta, s_hat):
    if s_hat == 0:
        return 0.0
    a = abs(x) / (2 * s_hat)
    return beta * (math.expm1(a) - a)


def _h(y):
    a = abs(y)
    return 0.5 * a * a if a <= 1 else a - 0.5


def _mismatch(hist, rec, i, k, recorded, replayed):
    if abs(recorded - replayed) > REPLAY_RTOL * max(abs(recorded), abs(replayed), 1e-300):
        raise HistoryMismatchError(
            f"trial {rec.t}, cell ({i}, {k}): recorded weight {recorded!r} but a "
            f"{hist.learner} replay gives {replayed!r}")


def _replay(hist: RunHistory, visit):
    """Replay a ScInOL run cell by cell in plain floating point.

    ``visit`` is called for every (trial, feature on the support, output) with
    a dict of the before/after statistics. The replay recomputes each weight
    and raises :class:`HistoryMismatchError` if it disagrees with the record.
    """
    if hist.learner not in ("scinol1", "scinol2"):
        raise HistoryMismatchError(f"cannot replay learner {hist.learner!r}")
    eps = float(hist.epsilon)
    K = hist.num_outputs or 1
    d = hist.dim
    M = [0.0] * d
    G = [[0.0] * K for _ in range(d)]
    S2 = [[0.0] * K for _ in range(d)]
    aux = [[eps] * K for _ in range(d)]  # beta or eta
    first = hist.learner == "scinol1"
    for rec in hist.records:
        t = rec.t
        g = hist.gradient(rec).tolist()
        w_rec = hist.support_weights(rec).reshape(rec.x.nnz, K).tolist()
        yhat = np.atleast_1d(np.asarray(rec.yhat, dtype=float)).tolist()
        pred = [0.0] * K
        mass = [0.0] * K
        for j, (i, xi) in enumerate(zip(rec.x.indices.tolist(), rec.x.values.tolist())):
            m_prev = M[i]
            m_now = max(m_prev, abs(xi))
            for k in range(K):
                s2_prev, g_prev, a_prev = S2[i][k], G[i][k], aux[i][k]
                s_ = s2_prev + m_now * m_now
                denom = math.sqrt(s_)
                theta = g_prev / denom if denom > 0 else 0.0
                if first:
                    a_now = min(a_prev, eps * s_ / (xi * xi * t)) if xi != 0 else a_prev
                    w = (a_now * _sgn(theta) * math.expm1(min(abs(theta) / 2, 700.0))
                         / (2 * denom)) if denom > 0 else 0.0
                else:
                    w = (_sgn(theta) * min(abs(theta), 1.0) * a_prev / (2 * denom)
                         if denom > 0 else 0.0)
                wr = w_rec[j][k]
                _mismatch(hist, rec, i, k, wr, w)
                gx = g[k] * xi
                if not first:
                    a_now = a_prev - gx * wr
                G[i][k] = g_prev - gx
                S2[i][k] = s2_prev + gx * gx
                aux[i][k] = a_now
                pred[k] += wr * xi
                mass[k] += abs(wr * xi)
                visit({
                    "t": t, "i": i, "k": k, "x": xi, "gx": gx, "w": wr,
                    "M_prev": m_prev, "M": m_now,
                    "G_prev": g_prev, "G": G[i][k],
                    "S2_prev": s2_prev, "S2": S2[i][k],
                    "aux_prev": a_prev, "aux": a_now,
                })
            M[i] = m_now
        for k in range(K):
            if abs(pred[k] - yhat[k]) > REPLAY_RTOL * max(1.0, mass[k]):
                raise HistoryMismatchError(f"trial {t}: recorded prediction disagrees with x^T w")
    return {"M": M, "G": G, "S2": S2, "aux": aux}


def per_trial_violations(hist: RunHistory) -> List[float]:
    """Violation of the per-trial potential inequality at every replayed cell.

    ScInOL1: w g x <= psi_{t-1}(G_{t-1}) - psi_t(G_t) + eps / t.
    ScInOL2 (trials t >= tau_i): eta_t / eta_{t-1} >= psi_t(G_t) / psi_{t-1}(G_{t-1}) e^{-delta_t}.
    """
    eps = float(hist.epsilon) if hist.epsilon is not None else 1.0
    out: List[float] = []

    def visit1(c):
        psi_prev = _psi1(c["G_prev"], c["aux_prev"], math.sqrt(c["S2_prev"] + c["M_prev"] ** 2))
        psi_now = _psi1(c["G"], c["aux"], math.sqrt(c["S2"] + c["M"] ** 2))
        lhs = c["w"] * c["gx"]
        rhs = psi_prev - psi_now + eps / c["t"]
        out.append((lhs - rhs) / max(1.0, abs(psi_prev), abs(psi_now)))

    def visit2(c):
        if c["M"] == 0:
            return
        s_prev = math.sqrt(c["S2_prev"] + c["M_prev"] ** 2)
        s_now = math.sqrt(c["S2"] + c["M"] ** 2)
        h_prev = _h(c["G_prev"] / s_prev) if s_prev > 0 else 0.0
        delta = c["gx"] ** 2 / (2 * (c["S2_prev"] + c["M"] ** 2))
        rhs = math.exp(0.5 * _h(c["G"] / s_now) - 0.5 * h_prev - delta)
        lhs = c["aux"] / c["aux_prev"]
        out.append((rhs - lhs) / max(1.0, lhs))

    _replay(hist, visit1 if hist.learner == "scinol1" else visit2)
    return out


def check_per_trial(hist: RunHistory) -> float:
    """Largest per-trial violation over the run; 0 for an empty history."""
    v = per_trial_violations(hist)
    return max(v) if v else 0.0


def check_beta_floor(hist: RunHistory) -> float:
    """max over cells of eps/t - beta_t and beta_t - beta_{t-1} (both should be <= 0)."""
    if hist.learner != "scinol1":
        raise HistoryMismatchError("beta only exists for scinol1 runs")
    eps = float(hist.epsilon)
    worst = [-math.inf]

    def visit(c):
        worst[0] = max(worst[0], eps / c["t"] - c["aux"], c["aux"] - c["aux_prev"])

    _replay(hist, visit)
    return worst[0] if hist.records else 0.0


@dataclass
class DeltaBound:
    """Delta_{T,i} = sum_{t >= tau_i} (g_t x_{t,i})^2 / (2 (S2_{t-1,i} + M_{t,i}^2))
    next to its bound ln(S_hat_{T,i}^2 / x_{tau_i,i}^2). Cells of features
    that were never nonzero are NaN in both arrays."""

    delta: np.ndarray
    bound: np.ndarray

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.bound)

    @property
    def max_violation(self) -> float:
        if not np.any(self.defined):
            return 0.0
        d, b = self.delta[self.defined], self.bound[self.defined]
        return float(np.max((d - b) / np.maximum(1.0, np.abs(b))))


def check_delta_bound(hist: RunHistory) -> DeltaBound:
    K = hist.num_outputs or 1
    delta = np.zeros((hist.dim, K))

    def visit(c):
        if c["M"] > 0:
            delta[c["i"], c["k"]] += c["gx"] ** 2 / (2 * (c["S2_prev"] + c["M"] ** 2))

    _replay(hist, visit)
    tau, x_tau = hist.tau()
    s_hat = hist.s_hat().reshape(hist.dim, K)
    bound = np.full((hist.dim, K), np.nan)
    live = tau > 0
    bound[live] = np.log(s_hat[live] ** 2 / (x_tau[live, None] ** 2))
    delta[~live] = np.nan
    if hist.num_outputs is None:
        delta, bound = delta[:, 0], bound[:, 0]
    return DeltaBound(delta, bound)


# ---------------------------------------------------------------------------
# conjugate lemmas and the h sandwich
# ---------------------------------------------------------------------------


def conjugate_samples(n, rng):
    u = rng.uniform(-5, 5, n)
    alpha = rng.uniform(0.1, 10, n)
    gamma = rng.uniform(0.1, 10, n)
    return u, alpha, gamma


def conjugate_checks(u, alpha, gamma, exact_tol=1e-6, bound_tol=1e-12) -> List[CheckResult]:
    exact, bound1 = fenchel_bound_1(u, alpha, gamma)
    num1 = conjugate_oracle_1(u, alpha, gamma)
    num2 = conjugate_oracle_2(u, alpha, gamma)
    bound2 = fenchel_bound_2(u, alpha, gamma)
    scale = lambda ref: np.maximum(1.0, np.abs(ref))
    n = int(np.size(u))
    return [
        CheckResult("conjugate1_exact", n,
                    float(np.max(np.abs(num1 - exact) / scale(exact))), exact_tol),
        CheckResult("conjugate1_exact_le_bound", n,
                    float(np.max((exact - bound1) / scale(bound1))), bound_tol),
        CheckResult("conjugate1_numeric_le_bound", n,
                    float(np.max((num1 - bound1) / scale(bound1))), bound_tol),
        CheckResult("conjugate2_numeric_le_bound", n,
                    float(np.max((num2 - bound2) / scale(bound2))), bound_tol),
    ]


def h_sandwich_violation(y) -> float:
    """max of (|y| - 1/2) - h(y) and h(y) - y^2/2."""
    y = np.asarray(y, dtype=np.float64)
    h = h_fn(y)
    return float(max(np.max(np.abs(y) - 0.5 - h), np.max(h - 0.5 * y * y)))


# ---------------------------------------------------------------------------
# the suite behind ``scinol verify``
# ---------------------------------------------------------------------------


def run_verification_suite(n_v=100, n_q=100, n_random=10_000, n_conjugate=1_000,
                           seed=0, histories: Iterable[RunHistory] = (),
                           grid_tol=1e-12, replay_tol=1e-9) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    gv, gq = lemma_grid(n_v, n_q)
    rv, rq = lemma_random(n_random, rng)
    results = [
        CheckResult("core_ineq_1_grid", gv.size, check_core_ineq_1(gv, gq), grid_tol),
        CheckResult("core_ineq_1_random", rv.size, check_core_ineq_1(rv, rq), grid_tol),
        CheckResult("core_ineq_2_grid", gv.size, check_core_ineq_2(gv, gq), grid_tol),
        CheckResult("core_ineq_2_random", rv.size, check_core_ineq_2(rv, rq), grid_tol),
    ]
    ys = np.linspace(-10, 10, 2001)
    results.append(CheckResult("h_sandwich", ys.size, h_sandwich_violation(ys), grid_tol))
    results.extend(conjugate_checks(*conjugate_samples(n_conjugate, rng)))
    for n, hist in enumerate(histories):
        tag = f"history{n}_{hist.learner}"
        cells = sum(r.x.nnz for r in hist.records) * (hist.num_outputs or 1)
        results.append(CheckResult(f"{tag}_per_trial", cells, check_per_trial(hist), replay_tol))
        if hist.learner == "scinol2":
            db = check_delta_bound(hist)
            results.append(CheckResult(f"{tag}_delta_bound", int(np.sum(db.defined)),
                                       db.max_violation, grid_tol))
    return results
