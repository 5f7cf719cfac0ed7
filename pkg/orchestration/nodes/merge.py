# orchestration/nodes/merge.py
from typing import Any, Dict

from file_processor.label_map_processor import render_boundaries, save_label_map, save_ppm
from orchestration.stage import stage, staged_path
from orchestration.state import PipelineState
from region_merging.rag import merge_regions

MERGED_LABELS = "labels_merged.pgm"
MERGED_OVERLAY = "segments_merged.ppm"


@stage("merge")
def merge(state: PipelineState) -> Dict[str, Any]:
    config = state["config"]
    raster = state["raster"]
    texture_band = raster.band(config.features.nir_index)
    labels = merge_regions(
        state["initial_labels"], raster, config.merging.weights, config.merging.scale, texture_band
    )
    save_label_map(labels, staged_path(state, MERGED_LABELS))
    save_ppm(render_boundaries(raster, labels), staged_path(state, MERGED_OVERLAY))
    return {"merged_labels": labels, "artifacts": [MERGED_LABELS, MERGED_OVERLAY]}
