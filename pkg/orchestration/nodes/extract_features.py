# orchestration/nodes/extract_features.py
import logging
from typing import Any, Dict

import numpy as np

from feature_extraction.feature_matrix import build_feature_matrix, majority_classes
from file_processor.table_processor import save_feature_table
from orchestration.stage import stage, staged_path
from orchestration.state import PipelineState

logger = logging.getLogger(__name__)

FEATURES = "features.csv"


@stage("extract_features")
def extract_features(state: PipelineState) -> Dict[str, Any]:
    config = state["config"]
    labels = state["merged_labels"]
    truth = None
    if state.get("truth_labels") is not None:
        truth = majority_classes(labels, state["truth_labels"], state["truth_classes"])
        logger.info("region counts per class: %s", np.bincount(truth).tolist())
    features = build_feature_matrix(
        state["raster"],
        labels,
        state["ndvi"],
        truth=truth,
        nir_index=config.features.nir_index,
        glcm_levels=config.features.glcm_levels,
    )
    save_feature_table(features, staged_path(state, FEATURES))
    return {"features": features, "artifacts": [FEATURES]}


def has_truth(state: PipelineState) -> str:
    if state["features"].classes is None:
        logger.warning("no ground truth: skipping evaluation, training and prediction")
        return "no_truth"
    return "labelled"
