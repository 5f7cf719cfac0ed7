# orchestration/nodes/predict_overlays.py
from typing import Any, Dict

from file_processor.label_map_processor import render_classification_overlay, save_ppm
from file_processor.table_processor import predictions_frame, save_predictions
from orchestration.stage import stage, staged_path
from orchestration.state import PipelineState

PREDICTIONS = "predictions.csv"


def overlay_file(name: str) -> str:
    return f"overlay_{name}.ppm"


@stage("predict")
def predict_overlays(state: PipelineState) -> Dict[str, Any]:
    """Detection map per method plus the ground truth; predictions CSV for the configured overlay model."""
    config = state["config"]
    ev = config.evaluation
    features = state["features"]
    raster, labels = state["raster"], state["merged_labels"]
    predictions, artifacts = {}, []
    for family, pipeline in state["classifiers"].items():
        predictions[family] = pipeline.predict(features.values)
        overlay = render_classification_overlay(raster, labels, predictions[family], ev.positive_class, ev.intact_class)
        save_ppm(overlay, staged_path(state, overlay_file(family)))
        artifacts.append(overlay_file(family))

    truth = render_classification_overlay(raster, labels, features.classes, ev.positive_class, ev.intact_class)
    save_ppm(truth, staged_path(state, overlay_file("truth")))
    artifacts.append(overlay_file("truth"))

    chosen = config.overlay_model if config.overlay_model in state["classifiers"] else next(iter(state["classifiers"]))
    pipeline = state["classifiers"][chosen]
    frame = predictions_frame(
        features.region_ids,
        pipeline.predict_proba(features.values),
        pipeline.classes_,
        predictions[chosen],
    )
    save_predictions(frame, staged_path(state, PREDICTIONS))
    artifacts.append(PREDICTIONS)
    return {"predictions": predictions, "artifacts": artifacts}
