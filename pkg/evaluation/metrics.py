# evaluation/metrics.py
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
from sklearn.metrics import cohen_kappa_score, confusion_matrix, precision_recall_fscore_support

from utils.errors import ArgumentError


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """K x K counts; rows are the true class, columns the prediction."""

    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1] or counts.shape[0] == 0:
            raise ArgumentError(f"confusion matrix must be square and non-empty, got {counts.shape}")
        if np.any(counts < 0):
            raise ArgumentError("confusion counts must be non-negative")
        object.__setattr__(self, "counts", counts)

    @property
    def n_classes(self) -> int:
        return self.counts.shape[0]

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if self.counts.shape != other.counts.shape:
            raise ArgumentError(f"cannot pool {self.counts.shape} and {other.counts.shape} confusion matrices")
        return ConfusionMatrix(self.counts + other.counts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)


def confusion(pred: Sequence[int], truth: Sequence[int], n_classes: Optional[int] = None) -> ConfusionMatrix:
    pred = np.asarray(pred, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if pred.shape != truth.shape or pred.ndim != 1:
        raise ArgumentError(f"prediction length {pred.shape} does not match truth length {truth.shape}")
    if n_classes is None:
        n_classes = int(max(pred.max(initial=0), truth.max(initial=0))) + 1
    for name, values in (("prediction", pred), ("truth", truth)):
        if values.size and (values.min() < 0 or values.max() >= n_classes):
            raise ArgumentError(f"{name} labels must lie in [0, {n_classes})")
    if truth.size == 0:
        return ConfusionMatrix(np.zeros((n_classes, n_classes), dtype=np.int64))
    return ConfusionMatrix(confusion_matrix(truth, pred, labels=np.arange(n_classes)))


def _label_pairs(cm: ConfusionMatrix):
    """(truth, pred) label arrays that reproduce the counts."""
    cells = np.repeat(np.arange(cm.counts.size), cm.counts.ravel())
    return np.divmod(cells, cm.n_classes)


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass
class MetricReport:
    precision: float
    recall: float
    f1: float
    kappa: float
    accuracy: float
    fold_accuracies: List[float] = field(default_factory=list)
    per_class: Dict[int, ClassMetrics] = field(default_factory=dict)
    positive_class: int = 1

    def as_dict(self) -> Dict[str, float]:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "kappa": self.kappa,
            "accuracy": self.accuracy,
        }


def per_class_metrics(cm: ConfusionMatrix) -> Dict[int, ClassMetrics]:
    """Precision, recall and F1 of every class; empty denominators score 0."""
    truth, pred = _label_pairs(cm)
    precision, recall, f1, _ = precision_recall_fscore_support(
        truth, pred, labels=np.arange(cm.n_classes), zero_division=0
    )
    return {
        k: ClassMetrics(precision=float(precision[k]), recall=float(recall[k]), f1=float(f1[k]))
        for k in range(cm.n_classes)
    }


def class_metrics(cm: ConfusionMatrix, cls: int) -> ClassMetrics:
    return per_class_metrics(cm)[cls]


def cohen_kappa(cm: ConfusionMatrix) -> float:
    counts = cm.counts.astype(np.float64)
    total = counts.sum()
    p_e = float(np.sum(counts.sum(axis=0) * counts.sum(axis=1))) / total ** 2
    # all mass on one class in both truth and prediction
    if p_e == 1.0:
        return 1.0
    truth, pred = _label_pairs(cm)
    return float(cohen_kappa_score(truth, pred, labels=np.arange(cm.n_classes)))


def metrics(cm: ConfusionMatrix, positive_class: int = 1) -> MetricReport:
    """Binary precision/recall/F1 for `positive_class` plus accuracy, Cohen's kappa and per-class scores."""
    if cm.total == 0:
        raise ArgumentError("metrics need a non-empty confusion matrix")
    if not 0 <= positive_class < cm.n_classes:
        raise ArgumentError(f"positive class {positive_class} outside [0, {cm.n_classes})")
    per_class = per_class_metrics(cm)
    positive = per_class[positive_class]
    accuracy = float(np.trace(cm.counts)) / cm.total
    return MetricReport(
        precision=positive.precision,
        recall=positive.recall,
        f1=positive.f1,
        kappa=cohen_kappa(cm),
        accuracy=accuracy,
        fold_accuracies=[accuracy],
        per_class=per_class,
        positive_class=positive_class,
    )
