"""The five evaluated learners behind one fit / predict-distribution surface."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..data import Dataset, FoldPlan
from .base import Classifier, NotFittedError
from .bftree import BFTree
from .logistic import Logistic
from .mlp import MLP
from .naive_bayes import NaiveBayes
from .rules import RuleLearner

CLASSIFIER_IDS = ("naive_bayes", "logistic", "mlp", "bf_tree", "rule_learner")

_REGISTRY = {
    "naive_bayes": NaiveBayes,
    "logistic": Logistic,
    "mlp": MLP,
    "bf_tree": BFTree,
    "rule_learner": RuleLearner,
}


def make_classifier(model_id: str, seed: int = 0, **params) -> Classifier:
    try:
        cls = _REGISTRY[model_id]
    except KeyError:
        raise ValueError(f"unknown classifier {model_id!r}; expected one of "
                         f"{', '.join(CLASSIFIER_IDS)}") from None
    if cls in (MLP, RuleLearner):
        params.setdefault("seed", seed)
    return cls(**params)


class FoldError(ValueError):
    pass


@dataclass
class CVResult:
    distributions: np.ndarray  # (n, K), aligned with instance order
    priors: np.ndarray         # (n, K) class frequencies of each instance's training fold
    models_trained: int


def cross_validate(model_id: str, d: Dataset, folds: FoldPlan, seed: int = 0,
                   **params) -> CVResult:
    """Fit on each fold's complement and predict its held-out instances."""
    if len(folds) != len(d):
        raise FoldError("fold plan does not match the dataset size")
    present = d.class_counts() > 0
    dist = np.zeros((len(d), d.n_classes))
    priors = np.zeros_like(dist)
    trained = 0
    for f, (train, test) in enumerate(folds.splits()):
        train_d = d.subset(train)
        counts = train_d.class_counts()
        missing = [d.class_domain[c] for c in np.flatnonzero(present & (counts == 0))]
        if missing:
            raise FoldError(f"training split of fold {f} has no instances of {missing}")
        model = make_classifier(model_id, seed=seed, **params).fit(train_d)
        trained += 1
        dist[test] = model.predict_proba(d.X[test])
        priors[test] = counts / counts.sum()
    return CVResult(dist, priors, trained)


def resubstitute(model_id: str, d: Dataset, seed: int = 0, **params) -> CVResult:
    """Training-set evaluation: fit once on ``d`` and predict ``d``."""
    model = make_classifier(model_id, seed=seed, **params).fit(d)
    counts = d.class_counts()
    priors = np.tile(counts / counts.sum(), (len(d), 1))
    return CVResult(model.predict_proba(d.X), priors, 1)


__all__ = [
    "BFTree", "CLASSIFIER_IDS", "CVResult", "Classifier", "FoldError", "Logistic", "MLP",
    "NaiveBayes", "NotFittedError", "RuleLearner", "cross_validate", "make_classifier",
    "resubstitute",
]
