# file_processor/table_processor.py
"""
CSV tables: per-region features, per-region classes, RegionStats summaries
and predictions. Floats are written with 17 significant digits so a reload
reproduces them exactly.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from feature_extraction.feature_matrix import CLASS_COLUMN, REGION_COLUMN, FeatureMatrix
from region_merging.region_stats import RegionStats
from utils.errors import DataError, RasterWriteError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def _write_csv(frame: pd.DataFrame, path, index: bool = True) -> None:
    try:
        frame.to_csv(path, index=index, float_format=FLOAT_FORMAT, lineterminator="\n")
    except OSError as e:
        raise RasterWriteError(f"cannot write {path}: {e}") from e


def _read_csv(path, **kwargs) -> pd.DataFrame:
    try:
        return pd.read_csv(path, float_precision="round_trip", **kwargs)
    except FileNotFoundError as e:
        raise DataError(f"file not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, ValueError) as e:
        raise DataError(f"{path}: {e}") from e


def save_feature_table(matrix: FeatureMatrix, path) -> None:
    _write_csv(matrix.to_frame(), path)
    logger.debug("wrote %d x %d feature table to %s", matrix.n_rows, len(matrix.columns), path)


def _class_ids(column: pd.Series, path) -> np.ndarray:
    if not pd.api.types.is_numeric_dtype(column) or column.isna().any() or np.any(column % 1 != 0):
        raise DataError(f"{path}: '{CLASS_COLUMN}' must hold an integer class for every region")
    return column.to_numpy(dtype=np.int64)


def load_feature_table(path) -> FeatureMatrix:
    frame = _read_csv(path)
    if REGION_COLUMN not in frame.columns:
        raise DataError(f"{path}: missing '{REGION_COLUMN}' column")
    frame = frame.set_index(REGION_COLUMN)
    classes = None
    if CLASS_COLUMN in frame.columns:
        classes = _class_ids(frame.pop(CLASS_COLUMN), path)
    if frame.shape[1] == 0:
        raise DataError(f"{path}: no feature columns")
    non_numeric = [c for c in frame.columns if not pd.api.types.is_numeric_dtype(frame[c])]
    if non_numeric:
        raise DataError(f"{path}: non-numeric feature columns {non_numeric}")
    frame = frame.astype(np.float64)
    if not np.all(np.isfinite(frame.to_numpy())):
        raise DataError(f"{path}: non-finite feature values")
    return FeatureMatrix(raw=frame, classes=classes)


def save_region_classes(classes: Sequence[int], path) -> None:
    frame = pd.DataFrame({REGION_COLUMN: np.arange(len(classes)), CLASS_COLUMN: np.asarray(classes, dtype=np.int64)})
    _write_csv(frame, path, index=False)


def load_region_classes(path) -> np.ndarray:
    """Class id per region, indexed by region id 0..R-1."""
    frame = _read_csv(path)
    missing = {REGION_COLUMN, CLASS_COLUMN} - set(frame.columns)
    if missing:
        raise DataError(f"{path}: missing columns {sorted(missing)}")
    frame = frame.sort_values(REGION_COLUMN)
    ids = frame[REGION_COLUMN].to_numpy()
    if not np.array_equal(ids, np.arange(len(ids))):
        raise DataError(f"{path}: region ids must cover 0..{len(ids) - 1} exactly once")
    return _class_ids(frame[CLASS_COLUMN], path)


def region_stats_frame(stats: List[RegionStats]) -> pd.DataFrame:
    rows = []
    for region, s in enumerate(stats):
        row = {
            REGION_COLUMN: region,
            "area": s.area,
            "perimeter": s.perimeter,
            "min_row": s.min_row,
            "max_row": s.max_row,
            "min_col": s.min_col,
            "max_col": s.max_col,
        }
        row.update({f"band{b}_mean": float(m) for b, m in enumerate(s.mean)})
        rows.append(row)
    return pd.DataFrame(rows).set_index(REGION_COLUMN)


def save_region_table(stats: List[RegionStats], path) -> None:
    _write_csv(region_stats_frame(stats), path)


def predictions_frame(
    region_ids: Sequence[int],
    probabilities: np.ndarray,
    class_labels: Sequence[int],
    predicted: Optional[Sequence[int]] = None,
) -> pd.DataFrame:
    probabilities = np.asarray(probabilities, dtype=np.float64)
    if predicted is None:
        predicted = np.asarray(class_labels)[probabilities.argmax(axis=1)]
    frame = pd.DataFrame({REGION_COLUMN: np.asarray(region_ids), "predicted": np.asarray(predicted, dtype=np.int64)})
    for j, label in enumerate(class_labels):
        frame[f"p_class{label}"] = probabilities[:, j]
    return frame.set_index(REGION_COLUMN)


def save_predictions(frame: pd.DataFrame, path) -> None:
    _write_csv(frame, path)


def save_report(frame: pd.DataFrame, path) -> None:
    _write_csv(frame, path, index=False)
