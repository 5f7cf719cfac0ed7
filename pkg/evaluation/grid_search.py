# evaluation/grid_search.py
"""
Exhaustive hyperparameter search scored by stratified cross-validation.
Cells may run in parallel; each cell's model seed is derived from the run
seed and the cell's own parameters, so scores do not depend on scheduling.
"""
import itertools
import logging
import zlib
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator

from evaluation.cross_validation import cross_validate, stratified_kfold, with_normalizer
from evaluation.metrics import MetricReport
from feature_extraction.feature_matrix import FeatureMatrix
from utils.errors import ArgumentError

logger = logging.getLogger(__name__)


@dataclass
class GridSpec:
    """Parameter name -> candidate values, enumerated in declaration order."""

    params: Dict[str, List[Any]]

    def __post_init__(self):
        if not self.params:
            raise ArgumentError("grid has no parameters")
        for name, candidates in self.params.items():
            if not candidates:
                raise ArgumentError(f"grid parameter '{name}' has no candidates")

    def cells(self) -> Iterator[Dict[str, Any]]:
        names = list(self.params)
        for values in itertools.product(*(self.params[n] for n in names)):
            yield dict(zip(names, values))

    def __len__(self) -> int:
        return int(np.prod([len(v) for v in self.params.values()]))


@dataclass
class GridSearchResult:
    best_params: Dict[str, Any]
    best_score: float
    table: pd.DataFrame
    reports: List[MetricReport] = field(default_factory=list, repr=False)


def cell_seed(seed: int, params: Dict[str, Any]) -> int:
    key = zlib.crc32(repr(sorted(params.items())).encode("utf-8"))
    return int(np.random.SeedSequence([seed, key]).generate_state(1)[0])


def _score_cell(
    trainer: BaseEstimator,
    params: Dict[str, Any],
    features: FeatureMatrix,
    folds: List[np.ndarray],
    seed: int,
    positive_class: int,
) -> MetricReport:
    pipeline = with_normalizer(trainer)
    settings = {f"model__{name}": value for name, value in params.items()}
    if "random_state" in pipeline.named_steps["model"].get_params():
        settings.setdefault("model__random_state", cell_seed(seed, params))
    pipeline.set_params(**settings)
    return cross_validate(pipeline, features, len(folds), seed, positive_class, folds=folds)


def grid_search(
    trainer: BaseEstimator,
    grid: GridSpec,
    features: FeatureMatrix,
    k: int = 5,
    seed: int = 42,
    positive_class: int = 1,
    n_jobs: int = 1,
) -> GridSearchResult:
    """Score every grid cell by mean CV accuracy; ties go to the first cell in grid order."""
    cells = list(grid.cells())
    folds = stratified_kfold(features.require_classes(), k, seed)
    reports = Parallel(n_jobs=n_jobs)(
        delayed(_score_cell)(trainer, params, features, folds, seed, positive_class) for params in cells
    )
    rows = []
    for params, report in zip(cells, reports):
        row = dict(params)
        row.update({f"fold{i + 1}_accuracy": acc for i, acc in enumerate(report.fold_accuracies)})
        row.update(
            mean_accuracy=report.accuracy,
            precision=report.precision,
            recall=report.recall,
            f1=report.f1,
            kappa=report.kappa,
        )
        rows.append(row)
        logger.info("grid cell %s: mean accuracy %.4f, kappa %.4f", params, report.accuracy, report.kappa)
    table = pd.DataFrame(rows)
    best = int(np.argmax(table["mean_accuracy"].to_numpy()))
    return GridSearchResult(
        best_params=cells[best],
        best_score=float(table["mean_accuracy"].iloc[best]),
        table=table,
        reports=list(reports),
    )
