# orchestration/nodes/train_models.py
from typing import Any, Dict

from evaluation.grid_search import cell_seed
from model_training.classifiers import make_classifier, save_classifier
from orchestration.stage import stage, staged_path
from orchestration.state import PipelineState


def model_file(family: str) -> str:
    return f"model_{family}.txt"


@stage("train")
def train_models(state: PipelineState) -> Dict[str, Any]:
    """Fit every family's best configuration on all labelled regions and save it."""
    config = state["config"]
    features = state["features"]
    classifiers, artifacts = {}, []
    for family, params in state["best_params"].items():
        pipeline = make_classifier(family, config.training, **params)
        pipeline.set_params(model__random_state=cell_seed(config.evaluation.seed, params))
        pipeline.fit(features.values, features.require_classes())
        save_classifier(pipeline, staged_path(state, model_file(family)))
        classifiers[family] = pipeline
        artifacts.append(model_file(family))
    return {"classifiers": classifiers, "artifacts": artifacts}
