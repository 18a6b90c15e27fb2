"""Scale-invariant online learning of linear models.

The learners ``ScInOL1`` and ``ScInOL2`` need no learning rate and produce
the same predictions when any feature is rescaled by a positive factor.
"""
from .baselines import SGD, AdaGrad, Adam, OGDPerDim, make_baseline
from .core import (AbsoluteLoss, BinaryLabel, ClassLabel, CrossEntropyLoss, FeatureVector,
                   HingeLoss, LabeledExample, LogisticLoss, RealLabel, SparseBatch, dot_predict,
                   make_loss)
from .errors import ScinolError
from .harness import ExperimentConfig, MetricsRow, run_experiment
from .learners import ScInOL1, ScInOL2, TrialRecord, multivariate_step, online_step

__version__ = "0.1.0"

__all__ = [
    "AbsoluteLoss", "AdaGrad", "Adam", "BinaryLabel", "ClassLabel", "CrossEntropyLoss",
    "ExperimentConfig", "FeatureVector", "HingeLoss", "LabeledExample", "LogisticLoss",
    "MetricsRow", "OGDPerDim", "RealLabel", "SGD", "ScInOL1", "ScInOL2", "ScinolError",
    "SparseBatch", "TrialRecord", "dot_predict", "make_baseline", "make_loss",
    "multivariate_step", "online_step", "run_experiment",
]
