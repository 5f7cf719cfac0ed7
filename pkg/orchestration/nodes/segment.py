# orchestration/nodes/segment.py
from typing import Any, Dict

from file_processor.label_map_processor import render_boundaries, save_label_map, save_ppm
from orchestration.stage import stage, staged_path
from orchestration.state import PipelineState
from segmentation.fast_scan import adaptive_merge_small, fast_scan_partition

INITIAL_LABELS = "labels_initial.pgm"
INITIAL_OVERLAY = "segments_initial.ppm"


@stage("segment")
def segment(state: PipelineState) -> Dict[str, Any]:
    cfg = state["config"].segmentation
    raster = state["raster"]
    labels = fast_scan_partition(raster, cfg.init_threshold)
    labels = adaptive_merge_small(labels, raster, cfg.min_size)
    save_label_map(labels, staged_path(state, INITIAL_LABELS))
    save_ppm(render_boundaries(raster, labels), staged_path(state, INITIAL_OVERLAY))
    return {"initial_labels": labels, "artifacts": [INITIAL_LABELS, INITIAL_OVERLAY]}
