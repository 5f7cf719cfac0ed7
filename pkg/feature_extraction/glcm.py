# feature_extraction/glcm.py
"""
Region-masked grey-level co-occurrence texture on the NIR band: symmetric
counts over the offsets (0,1), (1,0), (1,1), (1,-1), pairs fully inside the
region, grey levels min-max quantized over the region.
"""
from typing import NamedTuple, Optional, Tuple

import numpy as np

from file_processor.raster_processor import BandGrid
from segmentation.label_map import LabelMap
from utils.errors import ArgumentError, DegenerateRegionError

DEFAULT_LEVELS = 32
OFFSETS = ((0, 1), (1, 0), (1, 1), (1, -1))


class GlcmFeatures(NamedTuple):
    contrast: float
    correlation: float
    entropy: float


def quantize(values: np.ndarray, levels: int) -> np.ndarray:
    lo, hi = float(values.min()), float(values.max())
    if hi == lo:
        return np.zeros(values.shape, dtype=np.int64)
    q = np.floor((values - lo) / (hi - lo) * levels).astype(np.int64)
    return np.clip(q, 0, levels - 1)


def _shifted(array: np.ndarray, dr: int, dc: int) -> Tuple[np.ndarray, np.ndarray]:
    """Views (first, second) so that second[i, j] sits at offset (dr, dc) from first[i, j]."""
    h, w = array.shape
    c0, c1 = (0, w - dc) if dc >= 0 else (-dc, w)
    return array[0:h - dr, c0:c1], array[dr:h, c0 + dc:c1 + dc]


def cooccurrence_matrix(
    band: BandGrid,
    labels: LabelMap,
    region: int,
    levels: int = DEFAULT_LEVELS,
    bbox: Optional[Tuple[slice, slice]] = None,
) -> np.ndarray:
    """Normalized symmetric GLCM of one region."""
    if band.shape != labels.shape:
        raise ArgumentError(f"band {band.shape} does not match label map {labels.shape}")
    if levels < 2:
        raise ArgumentError(f"levels must be >= 2, got {levels}")
    labels.check_region(region)
    window = bbox if bbox is not None else (slice(None), slice(None))
    mask = labels.labels[window] == region
    values = band.values[window]
    q = np.zeros(mask.shape, dtype=np.int64)
    q[mask] = quantize(values[mask], levels)

    counts = np.zeros(levels * levels, dtype=np.int64)
    for dr, dc in OFFSETS:
        m0, m1 = _shifted(mask, dr, dc)
        q0, q1 = _shifted(q, dr, dc)
        both = m0 & m1
        counts += np.bincount(q0[both] * levels + q1[both], minlength=levels * levels)
    counts = counts.reshape(levels, levels)
    glcm = counts + counts.T
    total = glcm.sum()
    if total == 0:
        raise DegenerateRegionError(f"region {region} has no co-occurrence pair")
    return glcm / total


def glcm_statistics(p: np.ndarray) -> GlcmFeatures:
    levels = p.shape[0]
    i, j = np.indices((levels, levels))
    contrast = float(np.sum(p * (i - j) ** 2))
    mu_i = float(np.sum(i * p))
    mu_j = float(np.sum(j * p))
    sigma_i = float(np.sqrt(np.sum((i - mu_i) ** 2 * p)))
    sigma_j = float(np.sqrt(np.sum((j - mu_j) ** 2 * p)))
    if sigma_i * sigma_j == 0:
        correlation = 0.0
    else:
        correlation = float(np.sum((i - mu_i) * (j - mu_j) * p) / (sigma_i * sigma_j))
    nonzero = p[p > 0]
    entropy = float(-np.sum(nonzero * np.log(nonzero)))
    return GlcmFeatures(contrast, correlation, entropy)


def glcm_features(
    nir: BandGrid,
    labels: LabelMap,
    region: int,
    levels: int = DEFAULT_LEVELS,
    bbox: Optional[Tuple[slice, slice]] = None,
) -> GlcmFeatures:
    return glcm_statistics(cooccurrence_matrix(nir, labels, region, levels, bbox))
