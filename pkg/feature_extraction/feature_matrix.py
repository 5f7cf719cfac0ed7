# feature_extraction/feature_matrix.py
"""
Per-superpixel feature table.

Column order (2B + 10): band{b}_mean for every band, band{b}_var for every
band, area, shape_index, length_width_ratio, rectangular_fit, roundness,
density, glcm_contrast, glcm_correlation, glcm_entropy, ndvi_mean.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy import ndimage
from sklearn.base import BaseEstimator, TransformerMixin

from feature_extraction.glcm import DEFAULT_LEVELS, glcm_features
from feature_extraction.shape import ShapeFeatures, shape_features
from feature_extraction.spectral import spectral_stats_all
from file_processor.raster_processor import BandGrid, MultiBandRaster
from region_merging.region_stats import compute_region_stats
from segmentation.label_map import LabelMap
from utils.errors import ArgumentError, DegenerateRegionError

logger = logging.getLogger(__name__)

SHAPE_COLUMNS = list(ShapeFeatures._fields)
TEXTURE_COLUMNS = ["glcm_contrast", "glcm_correlation", "glcm_entropy"]
CLASS_COLUMN = "class"
REGION_COLUMN = "region_id"

TruthLike = Union[Sequence[int], np.ndarray, Mapping[int, int], pd.Series]


def feature_names(bands: int) -> List[str]:
    return (
        [f"band{b}_mean" for b in range(bands)]
        + [f"band{b}_var" for b in range(bands)]
        + SHAPE_COLUMNS
        + TEXTURE_COLUMNS
        + ["ndvi_mean"]
    )


class FeatureNormalizer(TransformerMixin, BaseEstimator):
    """Min-max scaling to [0, 1] fit on training rows; constant columns map to 0.5."""

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=np.float64)
        self.data_min_ = X.min(axis=0)
        self.data_max_ = X.max(axis=0)
        return self

    def transform(self, X):
        X = np.asarray(X, dtype=np.float64)
        span = self.data_max_ - self.data_min_
        constant = span == 0
        scaled = (X - self.data_min_) / np.where(constant, 1.0, span)
        scaled[:, constant] = 0.5
        return np.clip(scaled, 0.0, 1.0)


@dataclass
class FeatureMatrix:
    """Raw per-region features, optional class labels and the fitted normalization bounds."""

    raw: pd.DataFrame
    classes: Optional[np.ndarray] = None
    normalizer: Optional[FeatureNormalizer] = field(default=None, repr=False)

    def __post_init__(self):
        if self.classes is not None:
            self.classes = np.asarray(self.classes, dtype=np.int64)
            if len(self.classes) != len(self.raw):
                raise ArgumentError(f"{len(self.classes)} class labels for {len(self.raw)} rows")

    @property
    def n_rows(self) -> int:
        return len(self.raw)

    @property
    def columns(self) -> List[str]:
        return list(self.raw.columns)

    @property
    def values(self) -> np.ndarray:
        return self.raw.to_numpy(dtype=np.float64)

    @property
    def region_ids(self) -> np.ndarray:
        return self.raw.index.to_numpy()

    def fit_bounds(self, rows: Optional[Sequence[int]] = None) -> "FeatureMatrix":
        values = self.values if rows is None else self.values[np.asarray(rows)]
        self.normalizer = FeatureNormalizer().fit(values)
        return self

    def normalized(self) -> np.ndarray:
        if self.normalizer is None:
            self.fit_bounds()
        return self.normalizer.transform(self.values)

    def subset(self, rows: Sequence[int]) -> "FeatureMatrix":
        rows = np.asarray(rows)
        return FeatureMatrix(
            raw=self.raw.iloc[rows],
            classes=None if self.classes is None else self.classes[rows],
        )

    def require_classes(self) -> np.ndarray:
        if self.classes is None:
            raise ArgumentError("feature matrix has no class labels")
        return self.classes

    def to_frame(self) -> pd.DataFrame:
        frame = self.raw.copy()
        if self.classes is not None:
            frame[CLASS_COLUMN] = self.classes
        return frame


def _truth_array(truth: TruthLike, n_regions: int) -> np.ndarray:
    if isinstance(truth, (Mapping, pd.Series)):
        missing = [r for r in range(n_regions) if r not in truth]
        if missing:
            raise ArgumentError(f"no class for regions {missing[:10]}")
        return np.array([int(truth[r]) for r in range(n_regions)], dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if truth.shape != (n_regions,):
        raise ArgumentError(f"expected {n_regions} region classes, got shape {truth.shape}")
    return truth


def majority_classes(labels: LabelMap, truth_labels: LabelMap, truth_classes: TruthLike) -> np.ndarray:
    """Class covering most pixels of each region (ties to the smallest class id)."""
    if labels.shape != truth_labels.shape:
        raise ArgumentError(f"label map {labels.shape} does not match truth map {truth_labels.shape}")
    per_truth = _truth_array(truth_classes, truth_labels.n_regions)
    pixel_class = per_truth[truth_labels.labels.ravel()]
    n_classes = int(pixel_class.max()) + 1
    votes = np.zeros((labels.n_regions, n_classes), dtype=np.int64)
    np.add.at(votes, (labels.labels.ravel(), pixel_class), 1)
    return votes.argmax(axis=1)


def build_feature_matrix(
    raster: MultiBandRaster,
    labels: LabelMap,
    ndvi: BandGrid,
    truth: Optional[TruthLike] = None,
    nir_index: Optional[int] = None,
    glcm_levels: int = DEFAULT_LEVELS,
    train_rows: Optional[Sequence[int]] = None,
) -> FeatureMatrix:
    if raster.shape != labels.shape or ndvi.shape != labels.shape:
        raise ArgumentError(
            f"dimension mismatch: raster {raster.shape}, labels {labels.shape}, ndvi {ndvi.shape}"
        )
    nir = raster.band(raster.bands - 1 if nir_index is None else nir_index)
    n = labels.n_regions
    means, variances = spectral_stats_all(raster, labels)
    stats = compute_region_stats(raster, labels, nir)
    shapes = np.array([shape_features(s) for s in stats], dtype=np.float64)

    boxes = ndimage.find_objects(labels.labels + 1)
    texture = np.zeros((n, len(TEXTURE_COLUMNS)))
    degenerate = 0
    for region in range(n):
        try:
            texture[region] = glcm_features(nir, labels, region, glcm_levels, boxes[region])
        except DegenerateRegionError:
            degenerate += 1
    if degenerate:
        logger.debug("%d regions without co-occurrence pairs got zero texture", degenerate)

    flat = labels.labels.ravel()
    ndvi_mean = np.bincount(flat, weights=ndvi.values.ravel(), minlength=n) / np.bincount(flat, minlength=n)

    data = np.column_stack([means, variances, shapes, texture, ndvi_mean])
    raw = pd.DataFrame(data, columns=feature_names(raster.bands), index=pd.RangeIndex(n, name=REGION_COLUMN))
    classes = None if truth is None else _truth_array(truth, n)
    matrix = FeatureMatrix(raw=raw, classes=classes)
    matrix.fit_bounds(train_rows)
    logger.info("extracted %d features for %d regions", raw.shape[1], n)
    return matrix
