# orchestration/state.py
import operator
from typing import Annotated, Any, Dict, List, Optional, TypedDict

import numpy as np
import pandas as pd
from sklearn.pipeline import Pipeline

from feature_extraction.feature_matrix import FeatureMatrix
from file_processor.raster_processor import BandGrid, MultiBandRaster
from segmentation.label_map import LabelMap
from utils.config import PipelineConfig


# Single shared state across LangGraph nodes
class PipelineState(TypedDict, total=False):
    # Inputs
    config: PipelineConfig
    staging_dir: str
    raster: MultiBandRaster
    ndvi: BandGrid
    truth_labels: Optional[LabelMap]
    truth_classes: Optional[np.ndarray]

    # Segmentation / merging
    initial_labels: LabelMap
    merged_labels: LabelMap

    # Features
    features: FeatureMatrix

    # Evaluation
    grid_tables: Dict[str, pd.DataFrame]
    best_params: Dict[str, Dict[str, Any]]
    comparison: pd.DataFrame

    # Final models
    classifiers: Dict[str, Pipeline]
    predictions: Dict[str, np.ndarray]

    # Staged output files, relative to staging_dir
    artifacts: Annotated[List[str], operator.add]
