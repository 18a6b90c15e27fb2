import time

import numpy as np
import pytest

from scinol.analysis import RunHistory
from scinol.core import BinaryLabel, FeatureVector, LabeledExample, LogisticLoss
from scinol.learners import ScInOL1, ScInOL2, online_step

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def record_criterion():
    def record(n, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'} criterion {n}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed
    return record


def mixed_scale_stream(rng, T, d, zero_prob=0.2, spread=3.0):
    """Features with per-column scales 10^U(-spread, spread), some exact zeros,
    and labels from a logistic model."""
    scales = 10.0 ** rng.uniform(-spread, spread, d)
    X = rng.standard_normal((T, d)) * scales
    X[rng.random((T, d)) < zero_prob] = 0.0
    w_true = rng.standard_normal(d) / scales
    p = 1.0 / (1.0 + np.exp(-np.clip(X @ w_true, -50, 50)))
    y = np.where(rng.random(T) < p, 1, -1)
    return X, y, scales


def examples_from(X, y):
    return [LabeledExample(FeatureVector.from_dense(row), BinaryLabel(int(lab)))
            for row, lab in zip(X, y)]


def record_run(learner, examples, loss=None):
    loss = loss or LogisticLoss()
    hist = RunHistory(learner.name, learner.dim, learner.epsilon, learner.num_outputs)
    for ex in examples:
        hist.records.append(online_step(learner, ex, loss))
    return hist


class EnvelopeRuns(list):
    seconds = 0.0


@pytest.fixture(scope="session")
def envelope_runs():
    """100 seeded mixed-scale runs (T=1000, d=5) for each ScInOL variant."""
    start = time.perf_counter()
    runs = EnvelopeRuns()
    for seed in range(100):
        rng = np.random.default_rng(seed)
        X, y, scales = mixed_scale_stream(rng, 1000, 5)
        ex = examples_from(X, y)
        comparators = [rng.standard_normal(5) / scales * 10.0 ** rng.uniform(-1, 1)
                       for _ in range(10)]
        runs.append((seed, record_run(ScInOL1(5), ex), record_run(ScInOL2(5), ex), comparators))
    runs.seconds = time.perf_counter() - start
    return runs
