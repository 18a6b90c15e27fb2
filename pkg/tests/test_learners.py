import math

import numpy as np
import pytest

from scinol.core import (BinaryLabel, ClassLabel, CrossEntropyLoss, FeatureVector, LabeledExample,
                         LogisticLoss, SparseBatch)
from scinol.errors import ConfigError, DimensionError, LipschitzError, ProtocolError
from scinol.learners import (EXP_CLAMP, LearnerConfig, ScInOL1, ScInOL2, multivariate_step,
                             online_step, scinol1_begin_trial, scinol1_feedback, scinol1_kernel,
                             scinol2_begin_trial, scinol2_feedback)

ONE = FeatureVector(1, [0], [1.0])


def trial(learner, x, g):
    w = learner.begin_trial(x)
    learner.feedback(g)
    return w


class TestScInOL1:
    def test_first_weight_is_zero(self):
        learner = ScInOL1(3)
        w = learner.begin_trial(FeatureVector(3, [0, 2], [5.0, -1.0]))
        assert w.tolist() == [0.0, 0.0, 0.0]

    def test_hand_trace(self):
        # t=1: x=1, g=-1/2; t=2: x=1
        learner = ScInOL1(1)
        trial(learner, ONE, -0.5)
        w2 = learner.begin_trial(ONE)
        assert learner.beta[0] == 0.625
        theta = 0.5 / math.sqrt(1.25)
        assert theta == pytest.approx(0.4472136, abs=1e-7)
        assert w2[0] == pytest.approx(0.07003901343511812, rel=1e-14)
        assert w2[0] == pytest.approx(0.625 * math.expm1(theta / 2) / (2 * math.sqrt(1.25)), rel=1e-15)

    def test_zero_feature_leaves_state(self):
        learner = ScInOL1(2)
        trial(learner, FeatureVector(2, [0], [1.0]), -1.0)
        before = {k: v.copy() for k, v in learner.state().items()}
        w = trial(learner, FeatureVector(2, [1], [0.0]), 1.0)
        assert w.tolist() == [0.0, 0.0]
        for k, v in learner.state().items():
            np.testing.assert_array_equal(v, before[k])

    def test_beta_floor(self):
        rng = np.random.default_rng(1)
        learner = ScInOL1(3, epsilon=0.5)
        for t in range(1, 200):
            x = FeatureVector.from_dense(rng.standard_normal(3) * [1, 100, 1e-3])
            trial(learner, x, rng.uniform(-1, 1))
            assert np.all(learner.beta >= 0.5 / t)

    def test_exp_clamp_counted(self):
        w, clamped = scinol1_kernel(np.array([1e6]), np.array([1.0]), np.array([1.0]),
                                    np.array([1.0]))
        assert clamped == 1
        assert np.isfinite(w).all()
        assert EXP_CLAMP == 700.0


class TestScInOL2:
    def test_hand_trace(self):
        learner = ScInOL2(1)
        assert trial(learner, ONE, -0.5)[0] == 0.0
        assert learner.eta[0] == 1.0
        w2 = trial(learner, ONE, -0.5)
        assert w2[0] == pytest.approx(0.2, rel=1e-15)
        assert learner.eta[0] == pytest.approx(1.1, rel=1e-15)

    def test_clipped_weight(self):
        learner = ScInOL2(1)
        for _ in range(10):
            trial(learner, ONE, -1.0)
        w = learner.begin_trial(ONE)
        s_hat = math.sqrt(learner.S2[0] + 1.0)
        assert w[0] == pytest.approx(learner.eta[0] / (2 * s_hat), rel=1e-15)

    def test_eta_stays_positive(self):
        rng = np.random.default_rng(3)
        learner = ScInOL2(2)
        for _ in range(500):
            trial(learner, FeatureVector.from_dense(rng.standard_normal(2)), rng.choice([-1.0, 1.0]))
            assert np.all(learner.eta > 0)


class TestProtocol:
    def test_feedback_without_trial(self):
        with pytest.raises(ProtocolError):
            ScInOL1(1).feedback(0.0)

    def test_double_begin(self):
        learner = ScInOL2(1)
        learner.begin_trial(ONE)
        with pytest.raises(ProtocolError):
            learner.begin_trial(ONE)

    def test_lipschitz(self):
        learner = ScInOL1(1)
        learner.begin_trial(ONE)
        with pytest.raises(LipschitzError):
            learner.feedback(1.5)

    def test_dimension(self):
        with pytest.raises(DimensionError):
            ScInOL1(2).begin_trial(ONE)

    def test_bad_epsilon(self):
        with pytest.raises(ConfigError):
            ScInOL2(1, epsilon=0.0)

    @pytest.mark.parametrize("cls", [ScInOL1, ScInOL2])
    def test_score_is_pure(self, cls):
        rng = np.random.default_rng(4)
        learner = cls(3)
        for _ in range(20):
            trial(learner, FeatureVector.from_dense(rng.standard_normal(3)), rng.uniform(-1, 1))
        x = FeatureVector.from_dense(rng.standard_normal(3) * 10)
        before = {k: v.copy() for k, v in learner.state().items()}
        scored = learner.score(SparseBatch.from_vectors([x]))[0]
        for k, v in learner.state().items():
            np.testing.assert_array_equal(v, before[k])
        w = learner.begin_trial(x)
        assert scored == pytest.approx(float(w @ x.to_dense()), rel=1e-12)


class TestSteps:
    def test_online_step_record(self):
        learner = ScInOL1(1)
        rec = online_step(learner, LabeledExample(ONE, BinaryLabel(1)), LogisticLoss())
        assert (rec.t, rec.yhat, rec.g) == (1, 0.0, -0.5)

    def test_wiring_mismatch(self):
        with pytest.raises(ConfigError):
            online_step(ScInOL1(1), LabeledExample(ONE, ClassLabel(0)), CrossEntropyLoss(2))
        with pytest.raises(ConfigError):
            online_step(ScInOL1(1, num_outputs=2), LabeledExample(ONE, BinaryLabel(1)),
                        LogisticLoss())
        with pytest.raises(ConfigError):
            multivariate_step(ScInOL1(1), LabeledExample(ONE, BinaryLabel(1)), LogisticLoss())

    def test_multivariate_step(self):
        learner = ScInOL2(1, num_outputs=3)
        yhat, g = multivariate_step(learner, LabeledExample(ONE, ClassLabel(1)), CrossEntropyLoss(3))
        assert yhat.tolist() == [0.0, 0.0, 0.0]
        np.testing.assert_allclose(g, [1 / 3, -2 / 3, 1 / 3])
        assert learner.G.shape == (1, 3)


class TestFunctionalForm:
    def test_feedback_hand_trace(self):
        learner = LearnerConfig("scinol1", 1.0, 1).build()
        scinol1_begin_trial(learner, ONE)
        scinol1_feedback(learner, -0.5)
        assert (learner.G[0], learner.S2[0]) == (0.5, 0.25)
        scinol1_begin_trial(learner, FeatureVector(1, [0], [2.0]))
        scinol1_feedback(learner, 1.0)
        assert (learner.G[0], learner.S2[0]) == (-1.5, 4.25)

    def test_zero_gradient_keeps_eta(self):
        learner = ScInOL2(1)
        w = scinol2_begin_trial(learner, ONE)
        scinol2_feedback(learner, 0.7, w)
        assert learner.eta[0] == 1.0
        scinol2_begin_trial(learner, ONE)
        scinol2_feedback(learner, 0.0)
        assert learner.eta[0] == 1.0

    def test_wrong_weights_and_kind(self):
        learner = ScInOL2(1)
        trial(learner, ONE, -1.0)
        scinol2_begin_trial(learner, ONE)
        with pytest.raises(ProtocolError):
            scinol2_feedback(learner, 0.1, np.array([123.0]))
        with pytest.raises(ConfigError):
            scinol1_begin_trial(ScInOL2(1), ONE)
        with pytest.raises(ConfigError):
            LearnerConfig("scinol3").build()
