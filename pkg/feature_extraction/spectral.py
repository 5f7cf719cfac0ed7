# feature_extraction/spectral.py
from typing import Tuple

import numpy as np

from file_processor.raster_processor import MultiBandRaster
from segmentation.label_map import LabelMap
from utils.errors import ArgumentError


def spectral_stats(raster: MultiBandRaster, labels: LabelMap, region: int) -> Tuple[np.ndarray, np.ndarray]:
    """Population mean and variance of each band over one region."""
    if raster.shape != labels.shape:
        raise ArgumentError(f"label map {labels.shape} does not match raster {raster.shape}")
    mask = labels.mask(region)
    pixels = raster.values[:, mask].astype(np.float64)
    return pixels.mean(axis=1), pixels.var(axis=1)


def spectral_stats_all(raster: MultiBandRaster, labels: LabelMap) -> Tuple[np.ndarray, np.ndarray]:
    """(R, B) means and variances for every region, two-pass."""
    flat = labels.labels.ravel()
    n = labels.n_regions
    areas = np.bincount(flat, minlength=n).astype(np.float64)
    values = raster.values.reshape(raster.bands, -1).astype(np.float64)
    means = np.stack([np.bincount(flat, weights=v, minlength=n) / areas for v in values], axis=1)
    variances = np.stack(
        [np.bincount(flat, weights=(v - means[flat, b]) ** 2, minlength=n) / areas for b, v in enumerate(values)],
        axis=1,
    )
    return means, variances
