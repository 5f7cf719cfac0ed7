# orchestration/graph.py
import logging
import os
import shutil
import tempfile
from typing import Any, Dict

from langgraph.graph import END, START, StateGraph

from utils.config import PipelineConfig
from utils.errors import PublishError

from .nodes.evaluate_models import evaluate_models
from .nodes.extract_features import extract_features, has_truth
from .nodes.load_inputs import load_inputs
from .nodes.merge import merge
from .nodes.predict_overlays import predict_overlays
from .nodes.segment import segment
from .nodes.train_models import train_models
from .state import PipelineState

logger = logging.getLogger(__name__)


def build_graph():
    workflow = StateGraph(PipelineState)

    # Nodes
    workflow.add_node("load_inputs", load_inputs)
    workflow.add_node("segment", segment)
    workflow.add_node("merge", merge)
    workflow.add_node("extract_features", extract_features)
    workflow.add_node("evaluate", evaluate_models)
    workflow.add_node("train", train_models)
    workflow.add_node("predict", predict_overlays)

    # Edges (evaluation is skipped when the regions carry no truth)
    workflow.add_edge(START, "load_inputs")
    workflow.add_edge("load_inputs", "segment")
    workflow.add_edge("segment", "merge")
    workflow.add_edge("merge", "extract_features")
    workflow.add_conditional_edges("extract_features", has_truth, {"labelled": "evaluate", "no_truth": END})
    workflow.add_edge("evaluate", "train")
    workflow.add_edge("train", "predict")
    workflow.add_edge("predict", END)

    return workflow.compile()


def _publish(staging_dir: str, output_dir: str, artifacts) -> Dict[str, str]:
    """
    Swap staged artifacts into output_dir with os.replace. If any swap fails
    the files already moved are taken back out, earlier contents of
    output_dir are restored and PublishError is raised.
    """
    artifacts = list(artifacts)
    missing = [name for name in artifacts if not os.path.isfile(os.path.join(staging_dir, name))]
    if missing:
        raise PublishError(f"staged artifacts missing: {missing}")
    published = {name: os.path.join(output_dir, name) for name in artifacts}
    created = not os.path.exists(output_dir)
    backup_dir = tempfile.mkdtemp(prefix="previous_", dir=staging_dir)
    swapped = []
    try:
        os.makedirs(output_dir, exist_ok=True)
        for name in artifacts:
            target = published[name]
            if os.path.exists(target):
                os.replace(target, os.path.join(backup_dir, name))
            swapped.append(name)
            os.replace(os.path.join(staging_dir, name), target)
    except OSError as e:
        for name in reversed(swapped):
            target, previous = published[name], os.path.join(backup_dir, name)
            if os.path.exists(previous):
                os.replace(previous, target)
            elif os.path.exists(target):
                os.remove(target)
        if created:
            shutil.rmtree(output_dir, ignore_errors=True)
        raise PublishError(f"could not publish into {output_dir}: {e}") from e
    return published

    backup_dir = tempfile.mkdtemp(prefix="previous_", dir=staging_dir)
    swapped = []
    try:
        for name in artifacts:
            target = published[name]
            if os.path.exists(target):
                os.replace(target, os.path.join(backup_dir, name))
            swapped.append(name)
            os.replace(os.path.join(staging_dir, name), target)
    except OSError as e:
        for name in reversed(swapped):
            target, previous = published[name], os.path.join(backup_dir, name)
            if os.path.exists(previous):
                os.replace(previous, target)
            elif os.path.exists(target):
                os.remove(target)
        raise PublishError(f"could not publish into {output_dir}: {e}") from e
    return published


def run_pipeline(config: PipelineConfig) -> Dict[str, Any]:
    """
    Run every stage in order. Outputs are staged in a scratch directory and
    moved into config.output_dir only when all stages succeed; on failure the
    scratch directory is removed and the StageError propagates.
    """
    config.check_paths()
    output_dir = os.path.abspath(config.output_dir)
    parent = os.path.dirname(output_dir)
    os.makedirs(parent, exist_ok=True)
    staging_dir = tempfile.mkdtemp(prefix=".quakeseg_", dir=parent)
    try:
        result = build_graph().invoke({"config": config, "staging_dir": staging_dir, "artifacts": []})
        published = _publish(staging_dir, output_dir, result.get("artifacts", []))
    finally:
        shutil.rmtree(staging_dir, ignore_errors=True)
    logger.info("pipeline finished: %d artifacts in %s", len(published), output_dir)
    result["published"] = published
    return result
