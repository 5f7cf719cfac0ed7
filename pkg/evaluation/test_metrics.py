import numpy as np
import pytest
from sklearn.metrics import (
    cohen_kappa_score,
    confusion_matrix,
    f1_score,
    precision_recall_fscore_support,
    precision_score,
    recall_score,
)

from evaluation.metrics import ConfusionMatrix, cohen_kappa, confusion, metrics
from utils.errors import ArgumentError


def test_binary_worked_example():
    # TP=3, FP=1, FN=2, TN=4
    cm = ConfusionMatrix(np.array([[4, 1], [2, 3]]))
    report = metrics(cm, positive_class=1)
    assert report.precision == pytest.approx(0.75)
    assert report.recall == pytest.approx(0.6)
    assert report.f1 == pytest.approx(0.666667, abs=1e-6)
    assert report.accuracy == pytest.approx(0.7)
    # p_o = 0.7, p_e = (5*6 + 5*4) / 100 = 0.5
    assert report.kappa == pytest.approx(0.4)


def test_perfect_prediction_scores_one():
    report = metrics(confusion([0, 1, 2, 1], [0, 1, 2, 1]))
    assert (report.precision, report.recall, report.f1, report.kappa, report.accuracy) == (1, 1, 1, 1, 1)


def test_single_class_agreement_has_kappa_one():
    assert cohen_kappa(ConfusionMatrix(np.array([[5]]))) == 1.0


def test_empty_denominators_give_zero():
    report = metrics(confusion([0, 0, 0], [0, 0, 1], n_classes=2))
    assert report.precision == 0.0 and report.f1 == 0.0


def test_matches_sklearn_on_random_instances(rng):
    for _ in range(100):
        n_classes = int(rng.integers(2, 5))
        truth = rng.integers(0, n_classes, size=30)
        pred = rng.integers(0, n_classes, size=30)
        cm = confusion(pred, truth, n_classes)
        np.testing.assert_array_equal(cm.counts, confusion_matrix(truth, pred, labels=list(range(n_classes))))
        report = metrics(cm, positive_class=1)
        assert report.kappa == pytest.approx(cohen_kappa_score(truth, pred, labels=list(range(n_classes))), abs=1e-12)
        binary_truth, binary_pred = truth == 1, pred == 1
        assert report.precision == pytest.approx(precision_score(binary_truth, binary_pred, zero_division=0))
        assert report.recall == pytest.approx(recall_score(binary_truth, binary_pred, zero_division=0))
        assert report.f1 == pytest.approx(f1_score(binary_truth, binary_pred, zero_division=0))


def test_random_predictions_have_no_agreement():
    truth = np.repeat([0, 1], 500)
    kappas = [
        metrics(confusion(np.random.default_rng(seed).integers(0, 2, size=1000), truth)).kappa
        for seed in range(20)
    ]
    assert abs(np.mean(kappas)) < 0.05


def test_pooling_adds_counts():
    a = confusion([0, 1], [0, 0], n_classes=2)
    b = confusion([1, 1], [1, 0], n_classes=2)
    assert (a + b).counts.tolist() == [[1, 2], [0, 1]]
    with pytest.raises(ArgumentError):
        a + confusion([0], [0], n_classes=3)


def test_label_out_of_range():
    with pytest.raises(ArgumentError):
        confusion([0, 3], [0, 1], n_classes=2)
    with pytest.raises(ArgumentError):
        confusion([0, 1], [0])


def test_per_class_scores_match_sklearn_with_absent_classes():
    truth = np.array([0, 0, 1, 1, 1])
    pred = np.array([0, 1, 1, 1, 0])
    report = metrics(confusion(pred, truth, n_classes=3))
    precision, recall, f1, _ = precision_recall_fscore_support(truth, pred, labels=[0, 1, 2], zero_division=0)
    for k in range(3):
        assert report.per_class[k].precision == pytest.approx(precision[k])
        assert report.per_class[k].recall == pytest.approx(recall[k])
        assert report.per_class[k].f1 == pytest.approx(f1[k])
    assert report.per_class[2].precision == report.per_class[2].f1 == 0.0


def test_empty_confusion_has_the_requested_size():
    assert confusion([], [], n_classes=3).counts.tolist() == [[0] * 3] * 3
