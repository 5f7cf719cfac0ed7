# evaluation/cross_validation.py
import logging
from typing import List, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, clone
from sklearn.model_selection import StratifiedKFold
from sklearn.pipeline import Pipeline

from evaluation.metrics import ConfusionMatrix, MetricReport, confusion, metrics
from feature_extraction.feature_matrix import FeatureMatrix, FeatureNormalizer
from utils.errors import ArgumentError, StratificationError

logger = logging.getLogger(__name__)


def stratified_kfold(labels: Sequence[int], k: int, seed: int) -> List[np.ndarray]:
    """
    Split indices into k disjoint test folds preserving class proportions.

    Members of each class are shuffled with the seed and spread so that
    per-class and total fold sizes stay within one of each other.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise ArgumentError(f"k must be >= 2, got {k}")
    classes, counts = np.unique(labels, return_counts=True)
    short = classes[counts < k]
    if short.size:
        raise StratificationError(
            f"classes {short.tolist()} have fewer than k={k} members ({counts[counts < k].tolist()})"
        )
    splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    return [np.sort(test).astype(np.int64) for _, test in splitter.split(np.zeros(len(labels)), labels)]


def with_normalizer(estimator: BaseEstimator) -> Pipeline:
    """Wrap a bare estimator so min-max bounds are refit on every training split."""
    if isinstance(estimator, Pipeline):
        return clone(estimator)
    return Pipeline([("normalize", FeatureNormalizer()), ("model", clone(estimator))])


def cross_validate(
    trainer: BaseEstimator,
    features: FeatureMatrix,
    k: int = 5,
    seed: int = 42,
    positive_class: int = 1,
    folds: Optional[List[np.ndarray]] = None,
) -> MetricReport:
    """
    Stratified k-fold evaluation: normalizer and model are fit on k-1 folds
    and scored on the held-out one. Accuracy is the mean of the fold
    accuracies; the other metrics come from the pooled confusion matrix.
    """
    y = features.require_classes()
    if y.min() < 0:
        raise ArgumentError("class labels must be non-negative")
    x = features.values
    n_classes = max(int(y.max()) + 1, positive_class + 1)
    folds = folds if folds is not None else stratified_kfold(y, k, seed)
    pooled = ConfusionMatrix(np.zeros((n_classes, n_classes), dtype=np.int64))
    fold_accuracies: List[float] = []
    for i, test in enumerate(folds):
        train = np.setdiff1d(np.arange(len(y)), test, assume_unique=True)
        model = with_normalizer(trainer).fit(x[train], y[train])
        cm = confusion(model.predict(x[test]), y[test], n_classes)
        fold_accuracies.append(float(np.trace(cm.counts)) / cm.total)
        pooled = pooled + cm
        logger.debug("fold %d/%d accuracy %.4f", i + 1, len(folds), fold_accuracies[-1])
    report = metrics(pooled, positive_class)
    report.accuracy = float(np.mean(fold_accuracies))
    report.fold_accuracies = fold_accuracies
    return report
