"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""
import io
import math
import time

import numpy as np
import pytest

from conftest import examples_from, mixed_scale_stream, record_run
from scinol.analysis import (check_core_ineq_1, check_core_ineq_2, check_delta_bound,
                             check_per_trial, ideal_bound, lemma_grid, linearized_regret,
                             ogd_bound, oracle_rates, theorem1_bound, theorem2_bound)
from scinol.analysis.verify import conjugate_checks, conjugate_samples, lemma_random
from scinol.baselines import OGDPerDim
from scinol.core import (BinaryLabel, ClassLabel, CrossEntropyLoss, FeatureVector,
                         LabeledExample, LogisticLoss, dot_predict)
from scinol.data import ToySpec, apply_scaling, dumps_libsvm, gen_toy, parse_libsvm
from scinol.data.dataset import Dataset
from scinol.harness import ExperimentConfig, run_experiment, write_metrics
from scinol.learners import ScInOL1, ScInOL2


def _preds(learner_cls, ds):
    return np.array([r.yhat for r in record_run(learner_cls(ds.dim), ds.examples).records])


def _rel_gap(a, b, mass):
    return float(np.max(np.abs(a - b) / np.maximum(mass, 1e-300)))


class TestCriterion1ScaleInvariance:
    def test_scale_invariance(self, record_criterion):
        start = time.perf_counter()
        train, _, _ = gen_toy(ToySpec(n_train=1000, n_test=1, seed=11))
        rng = np.random.default_rng(2024)
        bitwise_ok = True
        worst_rel = 0.0
        for cls in (ScInOL1, ScInOL2):
            base_hist = record_run(cls(train.dim), train.examples)
            base = np.array([r.yhat for r in base_hist.records])
            # |w|.|x| per trial: the scale a relative error in x^T w is measured against
            mass = np.array([np.abs(r.w) @ np.abs(r.x.values) for r in base_hist.records])
            for _ in range(20):
                a = 2.0 ** rng.integers(-30, 31, train.dim)
                bitwise_ok &= np.array_equal(base, _preds(cls, apply_scaling(train, a)))
            for _ in range(20):
                a = 10.0 ** rng.uniform(-6, 6, train.dim)
                worst_rel = max(worst_rel, _rel_gap(_preds(cls, apply_scaling(train, a)), base, mass))
        elapsed = time.perf_counter() - start
        ok = bitwise_ok and worst_rel <= 1e-6 and elapsed < 10
        record_criterion(1, ok, f"power-of-two bitwise={bitwise_ok} max_rel_diff={worst_rel:.2e} "
                                f"(tol 1e-6) time={elapsed:.1f}s")
        assert ok


def _normalized(lhs, rhs):
    return (lhs - rhs) / max(1.0, abs(rhs))


class TestCriterion2RegretEnvelope:
    def test_regret_below_bounds(self, envelope_runs, record_criterion):
        start = time.perf_counter()
        worst = -math.inf
        cases = 0
        for _, h1, h2, comps in envelope_runs:
            for u in comps:
                worst = max(worst, _normalized(linearized_regret(h1, u), theorem1_bound(u, h1)))
                worst = max(worst, _normalized(linearized_regret(h2, u), theorem2_bound(u, h2)))
                cases += 2
        elapsed = time.perf_counter() - start + envelope_runs.seconds
        ok = worst <= 1e-6 and cases == 2000 and elapsed < 60
        record_criterion(2, ok, f"{cases} (run, comparator) cases, max (regret - bound)="
                                f"{worst:.3e} (tol 1e-6) time={elapsed:.1f}s")
        assert ok


def _spike_examples(seed, T=1000):
    rng = np.random.default_rng(seed)
    mags = np.where(np.arange(T) % 2 == 0, 1.0, 1e6)
    X = (mags * rng.choice([-1.0, 1.0], T))[:, None] * np.ones((1, 2))
    X[:, 1] *= rng.choice([-1.0, 1.0], T)
    y = rng.choice([-1, 1], T)
    return examples_from(X, y)


class TestCriterion3PerTrial:
    def test_per_trial_inequalities(self, envelope_runs, record_criterion):
        worst = -math.inf
        for _, h1, h2, _ in envelope_runs:
            worst = max(worst, check_per_trial(h1), check_per_trial(h2))
        spike = -math.inf
        for seed in range(5):
            ex = _spike_examples(seed)
            spike = max(spike, check_per_trial(record_run(ScInOL1(2), ex)),
                        check_per_trial(record_run(ScInOL2(2), ex)))
        ok = worst <= 1e-9 and spike <= 1e-9
        record_criterion(3, ok, f"max violation envelope runs={worst:.3e} spike runs={spike:.3e} "
                                f"(tol 1e-9)")
        assert ok


class TestCriterion4CoreLemmas:
    def test_grids_and_random(self, record_criterion):
        v, q = lemma_grid(100, 100)
        rv, rq = lemma_random(10_000, np.random.default_rng(0))
        worst = max(check_core_ineq_1(v, q), check_core_ineq_1(rv, rq),
                    check_core_ineq_2(v, q), check_core_ineq_2(rv, rq))
        ok = worst <= 1e-12 and v.size == 10_000
        record_criterion(4, ok, f"{v.size} grid + {rv.size} random points, both inequalities, "
                                f"max violation={worst:.3e} (tol 1e-12)")
        assert ok


class TestCriterion5Conjugates:
    def test_numeric_suprema(self, record_criterion):
        results = conjugate_checks(*conjugate_samples(1000, np.random.default_rng(5)))
        ok = all(r.passed for r in results)
        detail = " ".join(f"{r.check_name}={r.max_violation:.2e}" for r in results)
        record_criterion(5, ok, f"1000 random (u, alpha, gamma): {detail}")
        assert ok


class TestCriterion6DeltaBound:
    def test_delta_bound(self, envelope_runs, record_criterion):
        worst = -math.inf
        cells = 0
        for _, h1, h2, _ in envelope_runs:
            for h in (h1, h2):
                db = check_delta_bound(h)
                worst = max(worst, db.max_violation)
                cells += int(np.sum(db.defined))
        ok = worst <= 1e-12
        record_criterion(6, ok, f"{cells} feature cells, max (Delta - ln(S^2/x_tau^2))="
                                f"{worst:.3e} (tol 1e-12)")
        assert ok


def _ogd_run(X, g, rates, u):
    learner = OGDPerDim(X.shape[1], rates)
    regret = 0.0
    for row, gt in zip(X, g):
        x = FeatureVector.from_dense(row)
        w = learner.begin_trial(x)
        regret += gt * float(row @ (w - u))
        learner.feedback(gt)
    return regret


class TestCriterion7OGD:
    def test_fixed_and_oracle_rates(self, record_criterion):
        rng = np.random.default_rng(7)
        worst_fixed = worst_oracle = -math.inf
        for _ in range(50):
            T, d = 300, 5
            X = rng.standard_normal((T, d)) * 10.0 ** rng.uniform(-2, 2, d)
            g = rng.uniform(-1, 1, T)
            u = rng.standard_normal(d) * 10.0 ** rng.uniform(-2, 2, d)
            s2 = np.sum((g[:, None] * X) ** 2, axis=0)
            rates = 10.0 ** rng.uniform(-4, 1, d)
            worst_fixed = max(worst_fixed, _normalized(_ogd_run(X, g, rates, u),
                                                       ogd_bound(u, rates, s2)))
            worst_oracle = max(worst_oracle, _normalized(_ogd_run(X, g, oracle_rates(u, s2), u),
                                                         ideal_bound(u, s2)))
        ok = worst_fixed <= 1e-9 and worst_oracle <= 1e-9
        record_criterion(7, ok, f"50 sequences, max (regret - bound) fixed rates={worst_fixed:.3e} "
                                f"oracle rates={worst_oracle:.3e} (tol 1e-9)")
        assert ok


class TestCriterion8ToyReproduction:
    def test_toy(self, record_criterion):
        start = time.perf_counter()
        train, test, _ = gen_toy(ToySpec())
        ln2 = math.log(2.0)

        def curve(**kw):
            rows, _ = run_experiment(ExperimentConfig(**kw), train, test)
            return {r.step: r.avg_test_loss for r in rows}

        s2 = curve(learner="scinol2")
        s1 = curve(learner="scinol1")
        blowups = {}
        for name in ("sgd", "adam", "adagrad"):
            blowups[name] = [eta for eta in (0.001, 0.01, 0.1, 1.0, 10.0)
                             if max(curve(learner=name, eta=eta).values()) > ln2]
        elapsed = time.perf_counter() - start
        ok = (s2[5000] < ln2 and s1[5000] <= s1[250]
              and all(blowups.values()) and elapsed < 300)
        record_criterion(8, ok, f"scinol2 final={s2[5000]:.4f} (< ln2={ln2:.4f}); scinol1 "
                                f"@250={s1[250]:.4f} @5000={s1[5000]:.4f}; baseline etas above "
                                f"ln2: {blowups}; time={elapsed:.0f}s")
        assert ok


class TestCriterion9Multivariate:
    def test_multivariate_consistency(self, record_criterion):
        rng = np.random.default_rng(9)
        X, y, _ = mixed_scale_stream(rng, 500, 4)
        ex = examples_from(X, y)
        loss = LogisticLoss()
        bitwise = True
        for cls in (ScInOL1, ScInOL2):
            uni, multi = cls(4), cls(4, num_outputs=1)
            for e in ex:
                w1 = uni.begin_trial(e.x)
                wk = multi.begin_trial(e.x)
                bitwise &= np.array_equal(w1, wk[:, 0])
                g = loss.subgradient(e.y, dot_predict(w1, e.x))
                uni.feedback(g)
                multi.feedback([g])
        ce = CrossEntropyLoss(2)
        z = rng.standard_normal(10_000) * 10.0 ** rng.uniform(-3, 3, 10_000)
        gap = 0.0
        for zi in z[:2000]:
            for k, yb in ((1, 1), (0, -1)):
                pred = np.array([0.0, zi])
                gap = max(gap, abs(ce.value(ClassLabel(k), pred) - loss.value(BinaryLabel(yb), zi)),
                          abs(ce.subgradient(ClassLabel(k), pred)[1]
                              - loss.subgradient(BinaryLabel(yb), zi)))
        norm = 0.0
        for _ in range(10_000):
            K = int(rng.integers(2, 6))
            pred = rng.standard_normal(K) * 10.0 ** rng.uniform(-3, 3)
            norm = max(norm, np.max(np.abs(CrossEntropyLoss(K).subgradient(
                ClassLabel(int(rng.integers(K))), pred))))
        ok = bitwise and gap <= 1e-9 and norm <= 1.0
        record_criterion(9, ok, f"K=1 bitwise={bitwise} CE-vs-logistic gap={gap:.2e} "
                                f"(tol 1e-9) max |grad|={norm:.6f}")
        assert ok


class TestCriterion10Determinism:
    def test_bytes_and_roundtrip(self, record_criterion):
        train, test, u = gen_toy(ToySpec(n_train=400, n_test=300, seed=3))
        outputs = []
        for _ in range(2):
            cfg = ExperimentConfig(learner="scinol2", epochs=2, seed=5, record_history=True)
            rows, hist = run_experiment(cfg, train, test, u)
            buf = io.StringIO()
            write_metrics(rows, buf)
            outputs.append((buf.getvalue(), hist.dumps()))
        same = outputs[0] == outputs[1]
        text = dumps_libsvm(train)
        back = parse_libsvm(io.StringIO(text), dim=train.dim)
        rng = np.random.default_rng(10)
        sparse_rows = [FeatureVector.from_dense(np.where(rng.random(8) < 0.5, 0.0,
                                                         rng.standard_normal(8) * 1e-7))
                       for _ in range(50)]
        sparse = Dataset(tuple(LabeledExample(x, BinaryLabel(int(s))) for x, s in
                               zip(sparse_rows, rng.choice([-1, 1], 50))), 8, 2)
        back2 = parse_libsvm(io.StringIO(dumps_libsvm(sparse)), dim=8)
        ok = same and back == train and back2 == sparse
        record_criterion(10, ok, f"identical metrics+history bytes={same} "
                                 f"libsvm round-trip toy={back == train} sparse={back2 == sparse}")
        assert ok
