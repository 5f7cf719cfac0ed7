# orchestration/nodes/load_inputs.py
import logging
from typing import Any, Dict

from data_synthesizer import generate_scene, load_scene_spec
from file_processor.file_processor import FileProcessor
from file_processor.raster_processor import compute_ndvi
from file_processor.table_processor import load_region_classes
from orchestration.stage import stage
from orchestration.state import PipelineState
from utils.errors import ArgumentError

logger = logging.getLogger(__name__)


@stage("load_inputs")
def load_inputs(state: PipelineState) -> Dict[str, Any]:
    config = state["config"]
    truth_labels = truth_classes = None
    if config.synth_spec is not None:
        raster, truth_labels, truth_classes = generate_scene(load_scene_spec(config.synth_spec))
    else:
        files = FileProcessor()
        raster = files.process(str(config.input_raster))
        if config.truth_labels is not None:
            truth_labels = files.process(str(config.truth_labels))
            truth_classes = load_region_classes(config.truth_classes)
            if truth_labels.shape != raster.shape:
                raise ArgumentError(f"truth map {truth_labels.shape} does not match raster {raster.shape}")
    ndvi = compute_ndvi(raster, config.features.nir_index, config.features.red_index)
    logger.info("input raster %dx%d with %d bands", raster.width, raster.height, raster.bands)
    return {
        "raster": raster,
        "ndvi": ndvi,
        "truth_labels": truth_labels,
        "truth_classes": truth_classes,
    }
