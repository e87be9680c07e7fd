"""Evaluation parameters: MS, RAE, one-vs-rest rates and their group means."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .data import Dataset

RATE_KEYS = ("tp_rate", "tn_rate", "fp_rate", "fn_rate")


def _check_aligned(predictions: np.ndarray, d: Dataset) -> np.ndarray:
    predictions = np.asarray(predictions, dtype=float)
    if predictions.ndim != 2 or predictions.shape[0] != len(d):
        raise ValueError(f"got {predictions.shape[0] if predictions.ndim else 0} predictions "
                         f"for {len(d)} instances")
    return predictions


def predicted_labels(predictions: np.ndarray) -> np.ndarray:
    # np.argmax returns the first maximum, i.e. the lowest class index on ties
    return np.argmax(np.asarray(predictions), axis=1)


def misclassified_count(predictions: np.ndarray, d: Dataset) -> int:
    predictions = _check_aligned(predictions, d)
    return int(np.sum(predicted_labels(predictions) != d.y))


def _mean(values: Sequence[float], what: str) -> float:
    values = list(values)
    if not values:
        raise ValueError(f"{what} of an empty sequence is undefined")
    return float(sum(values) / len(values))


def ams(ms_values: Sequence[float]) -> float:
    return _mean(ms_values, "AMS")


def arae(rae_values: Sequence[float]) -> float:
    return _mean(rae_values, "ARAE")


def relative_absolute_error(predictions: np.ndarray, d: Dataset,
                            baseline_priors: np.ndarray) -> float:
    """Percent absolute error of the predicted distributions relative to a
    prior-predicting baseline.

    ``baseline_priors`` is either one class distribution or one per instance
    (the training-fold priors under cross-validation).
    """
    predictions = _check_aligned(predictions, d)
    truth = np.eye(d.n_classes)[d.y]
    priors = np.broadcast_to(np.asarray(baseline_priors, dtype=float), truth.shape)
    denom = np.abs(priors - truth).sum()
    if denom == 0:
        raise ValueError("relative absolute error is undefined: baseline is already perfect")
    return float(100.0 * np.abs(predictions - truth).sum() / denom)


@dataclass
class ConfusionSummary:
    label: str
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def confusion_matrix(predictions: np.ndarray, d: Dataset) -> np.ndarray:
    """Rows are true classes, columns predicted classes."""
    predictions = _check_aligned(predictions, d)
    cm = np.zeros((d.n_classes, d.n_classes), dtype=np.int64)
    np.add.at(cm, (d.y, predicted_labels(predictions)), 1)
    return cm


def one_vs_rest(cm: np.ndarray, class_domain: Sequence[str]) -> list[ConfusionSummary]:
    cm = np.asarray(cm)
    total = int(cm.sum())
    out = []
    for c, label in enumerate(class_domain):
        tp = int(cm[c, c])
        fn = int(cm[c].sum() - tp)
        fp = int(cm[:, c].sum() - tp)
        out.append(ConfusionSummary(label, tp, total - tp - fn - fp, fp, fn))
    return out


def _ratio(num: int, den: int, flags: list[str], name: str) -> float:
    if den == 0:
        flags.append(name)
        return 0.0
    return num / den


@dataclass
class ClassRates:
    per_class: dict[str, dict[str, float]]
    macro: dict[str, float]
    micro: dict[str, float]
    zero_denominators: list[str] = field(default_factory=list)


def rates_from_confusion(cm: np.ndarray, class_domain: Sequence[str]) -> ClassRates:
    flags: list[str] = []
    per_class = {}
    sums = dict(tp=0, tn=0, fp=0, fn=0)
    for s in one_vs_rest(cm, class_domain):
        per_class[s.label] = {
            "tp_rate": _ratio(s.tp, s.tp + s.fn, flags, f"{s.label}:tp_rate"),
            "tn_rate": _ratio(s.tn, s.tn + s.fp, flags, f"{s.label}:tn_rate"),
            "fp_rate": _ratio(s.fp, s.fp + s.tn, flags, f"{s.label}:fp_rate"),
            "fn_rate": _ratio(s.fn, s.tp + s.fn, flags, f"{s.label}:fn_rate"),
        }
        for k in sums:
            sums[k] += getattr(s, k)
    macro = {k: float(np.mean([r[k] for r in per_class.values()])) for k in RATE_KEYS}
    scratch: list[str] = []
    micro = {
        "tp_rate": _ratio(sums["tp"], sums["tp"] + sums["fn"], scratch, ""),
        "tn_rate": _ratio(sums["tn"], sums["tn"] + sums["fp"], scratch, ""),
        "fp_rate": _ratio(sums["fp"], sums["fp"] + sums["tn"], scratch, ""),
        "fn_rate": _ratio(sums["fn"], sums["tp"] + sums["fn"], scratch, ""),
    }
    return ClassRates(per_class, macro, micro, flags)


def class_rates(predictions: np.ndarray, d: Dataset) -> ClassRates:
    return rates_from_confusion(confusion_matrix(predictions, d), d.class_domain)


def group_rates(per_classifier_rates: Sequence[dict[str, float]]) -> dict[str, float]:
    rates = list(per_classifier_rates)
    if not rates:
        raise ValueError("group rates of an empty classifier group are undefined")
    return {f"a{k}": _mean([r[k] for r in rates], k) for k in RATE_KEYS}


@dataclass
class ClassifierResult:
    classifier: str
    ms: int
    rae: float
    rates: dict[str, float]
    per_class: dict[str, dict[str, float]]
    zero_denominators: list[str] = field(default_factory=list)


@dataclass
class EvaluationReport:
    method: str
    seed: int
    folds: dict
    classifiers: list[ClassifierResult]
    group: dict[str, float]
    n_instances: int
    selected_features: list[str]
    averaging: str = "macro"
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def check_identities(self) -> None:
        """Recompute the group means from the per-classifier entries."""
        expected = summarize_group(self.classifiers)
        for k, v in expected.items():
            if self.group[k] != v:
                raise AssertionError(f"group value {k} = {self.group[k]} != recomputed {v}")


def summarize_group(results: Sequence[ClassifierResult]) -> dict[str, float]:
    group = {"ams": ams([r.ms for r in results]), "arae": arae([r.rae for r in results])}
    group.update(group_rates([r.rates for r in results]))
    return group


def evaluate_predictions(name: str, predictions: np.ndarray, priors: np.ndarray,
                         d: Dataset, averaging: str = "macro") -> ClassifierResult:
    rates = class_rates(predictions, d)
    return ClassifierResult(
        classifier=name,
        ms=misclassified_count(predictions, d),
        rae=relative_absolute_error(predictions, d, priors),
        rates=rates.macro if averaging == "macro" else rates.micro,
        per_class=rates.per_class,
        zero_denominators=rates.zero_denominators,
    )
