import numpy as np
import pandas as pd
import pytest
from sklearn.dummy import DummyClassifier
from sklearn.model_selection import StratifiedKFold

from evaluation.cross_validation import cross_validate, stratified_kfold
from evaluation.grid_search import GridSpec, cell_seed, grid_search
from feature_extraction.feature_matrix import FeatureMatrix
from model_training.classifiers import make_classifier
from utils.errors import ArgumentError, StratificationError


def _features(rng, classes):
    raw = pd.DataFrame(rng.normal(size=(len(classes), 3)), columns=["a", "b", "c"])
    raw.index.name = "region_id"
    return FeatureMatrix(raw=raw, classes=np.asarray(classes))


def _separable(rng, n_per_class=15):
    classes = np.repeat([0, 1, 2], n_per_class)
    raw = pd.DataFrame(rng.normal(size=(len(classes), 2)) * 0.2 + classes[:, None] * 3.0, columns=["a", "b"])
    raw.index.name = "region_id"
    return FeatureMatrix(raw=raw, classes=classes)


def test_folds_partition_and_stratify(rng):
    labels = np.array([0] * 23 + [1] * 11 + [2] * 6)
    folds = stratified_kfold(labels, 5, seed=3)
    joined = np.concatenate(folds)
    assert sorted(joined.tolist()) == list(range(len(labels)))
    sizes = [len(f) for f in folds]
    assert max(sizes) - min(sizes) <= 1
    for cls, total in ((0, 23), (1, 11), (2, 6)):
        per_fold = [int(np.sum(labels[f] == cls)) for f in folds]
        assert sum(per_fold) == total and max(per_fold) - min(per_fold) <= 1


def test_folds_are_seeded():
    labels = np.repeat([0, 1], 10)
    a = stratified_kfold(labels, 4, seed=1)
    b = stratified_kfold(labels, 4, seed=1)
    c = stratified_kfold(labels, 4, seed=2)
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    assert not all(np.array_equal(x, y) for x, y in zip(a, c))


def test_too_few_members_for_k():
    with pytest.raises(StratificationError):
        stratified_kfold([0] * 10 + [1] * 3, 5, seed=0)
    with pytest.raises(ArgumentError):
        stratified_kfold([0, 1], 1, seed=0)


def test_folds_are_sklearn_stratified_test_sets():
    labels = np.array([0] * 12 + [1] * 8)
    expected = [np.sort(test) for _, test in StratifiedKFold(4, shuffle=True, random_state=9).split(labels, labels)]
    folds = stratified_kfold(labels, 4, seed=9)
    assert all(np.array_equal(a, b) for a, b in zip(folds, expected))


def test_majority_baseline_scores_the_majority_share(rng):
    features = _features(rng, [0] * 70 + [1] * 30)
    report = cross_validate(DummyClassifier(strategy="most_frequent"), features, k=5, seed=0)
    assert report.accuracy == pytest.approx(0.7)
    assert len(report.fold_accuracies) == 5
    assert report.recall == 0.0 and report.kappa == 0.0


def test_cross_validation_of_a_real_model(rng):
    features = _separable(rng)
    report = cross_validate(make_classifier("elm", hidden_width=10), features, k=3, seed=0)
    assert report.accuracy >= 0.9
    assert set(report.per_class) == {0, 1, 2}


def test_grid_table_and_best_cell(rng):
    features = _separable(rng)
    grid = GridSpec({"hidden_width": [1, 10], "ridge": [1e-6, 1e-3]})
    result = grid_search(make_classifier("elm"), grid, features, k=3, seed=0)
    assert len(result.table) == len(grid) == 4
    assert list(result.table.columns[:2]) == ["hidden_width", "ridge"]
    assert {"fold1_accuracy", "fold3_accuracy", "mean_accuracy", "kappa", "f1"} <= set(result.table.columns)
    assert result.best_score == result.table["mean_accuracy"].max()


def test_cell_scores_do_not_depend_on_grid_order(rng):
    features = _separable(rng)
    forward = grid_search(make_classifier("elm"), GridSpec({"hidden_width": [3, 6]}), features, k=3, seed=5)
    backward = grid_search(make_classifier("elm"), GridSpec({"hidden_width": [6, 3]}), features, k=3, seed=5)
    a = forward.table.set_index("hidden_width")["mean_accuracy"]
    b = backward.table.set_index("hidden_width")["mean_accuracy"]
    pd.testing.assert_series_equal(a.sort_index(), b.sort_index())
    assert cell_seed(5, {"hidden_width": 3}) != cell_seed(5, {"hidden_width": 6})


def test_parallel_cells_match_serial(rng):
    features = _separable(rng)
    grid = GridSpec({"hidden_width": [2, 4, 8]})
    serial = grid_search(make_classifier("elm"), grid, features, k=3, seed=1, n_jobs=1)
    parallel = grid_search(make_classifier("elm"), grid, features, k=3, seed=1, n_jobs=2)
    pd.testing.assert_frame_equal(serial.table, parallel.table)


def test_ties_go_to_the_first_cell(rng):
    features = _features(rng, [0] * 14 + [1] * 6)
    grid = GridSpec({"strategy": ["prior", "most_frequent"]})
    result = grid_search(DummyClassifier(), grid, features, k=2, seed=0)
    assert result.table["mean_accuracy"].nunique() == 1
    assert result.best_params == {"strategy": "prior"}


def test_empty_grid_rejected():
    with pytest.raises(ArgumentError):
        GridSpec({})
    with pytest.raises(ArgumentError):
        GridSpec({"hidden_width": []})
