# orchestration/nodes/evaluate_models.py
"""Grid search per model family, then a second stratified CV of the best cell on fresh folds."""
import logging
from typing import Any, Dict

import pandas as pd

from evaluation.cross_validation import cross_validate
from evaluation.grid_search import GridSpec, cell_seed, grid_search
from file_processor.table_processor import save_report
from model_training.classifiers import make_classifier
from orchestration.stage import stage, staged_path
from orchestration.state import PipelineState
from utils.config import WIDTH_GRID

logger = logging.getLogger(__name__)

REPORT = "report.csv"
COMPARISON = "comparison.csv"


@stage("evaluate")
def evaluate_models(state: PipelineState) -> Dict[str, Any]:
    config = state["config"]
    ev = config.evaluation
    features = state["features"]
    grid_tables, best_params, rows = {}, {}, []
    for family in ev.models:
        grid = GridSpec(ev.grid.get(family, {"hidden_width": list(WIDTH_GRID)}))
        trainer = make_classifier(family, config.training)
        result = grid_search(trainer, grid, features, ev.k, ev.seed, ev.positive_class, ev.n_jobs)
        grid_tables[family] = result.table
        best_params[family] = result.best_params

        final = make_classifier(family, config.training, **result.best_params)
        final.set_params(model__random_state=cell_seed(ev.seed, result.best_params))
        report = cross_validate(final, features, ev.k, ev.seed + 1, ev.positive_class)
        row = {"model": family}
        row.update(result.best_params)
        row.update(report.as_dict())
        rows.append(row)
        logger.info("%s best %s: kappa %.4f, F1 %.4f, CV accuracy %.4f",
                    family, result.best_params, report.kappa, report.f1, report.accuracy)

    table = pd.concat(
        [t.assign(model=family)[["model"] + list(t.columns)] for family, t in grid_tables.items()],
        ignore_index=True,
    )
    comparison = pd.DataFrame(rows)
    save_report(table, staged_path(state, REPORT))
    save_report(comparison, staged_path(state, COMPARISON))
    return {
        "grid_tables": grid_tables,
        "best_params": best_params,
        "comparison": comparison,
        "artifacts": [REPORT, COMPARISON],
    }
