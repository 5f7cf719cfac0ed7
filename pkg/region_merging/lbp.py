# region_merging/lbp.py
"""
Local binary patterns: each of P neighbors on a circle of radius R
(counter-clockwise from east, bilinear interpolation) contributes bit p when
g_p - g_c >= 0. Codes come from skimage; pixels whose circle leaves the
image are masked as -1.
"""
import math
import warnings

import numpy as np
from skimage.feature import local_binary_pattern

from file_processor.raster_processor import BandGrid
from segmentation.label_map import LabelMap
from utils.errors import ArgumentError, DegenerateInputError, OutOfDomainError

LBP_POINTS = 8
LBP_RADIUS = 1
LBP_BINS = 2 ** LBP_POINTS
_EPS = 1e-12


def _check_params(points: int, radius: float) -> int:
    # codes are returned as float64, exact up to 32 bits
    if points < 1 or points > 32:
        raise ArgumentError(f"P must be in 1..32, got {points}")
    if radius <= 0:
        raise ArgumentError(f"R must be > 0, got {radius}")
    return int(math.ceil(radius))


def _codes(values: np.ndarray, points: int, radius: float) -> np.ndarray:
    with warnings.catch_warnings():
        # reflectance bands are float by nature
        warnings.filterwarnings("ignore", message=".*floating-point images.*")
        codes = local_binary_pattern(np.asarray(values, dtype=np.float64), points, radius, method="default")
    return codes.astype(np.int64)


def lbp_code(band: BandGrid, row: int, col: int, points: int = LBP_POINTS, radius: float = LBP_RADIUS) -> int:
    margin = _check_params(points, radius)
    if not (margin <= row < band.height - margin and margin <= col < band.width - margin):
        raise OutOfDomainError(f"pixel ({row}, {col}) is closer than {margin} to the border")
    r0, c0 = max(0, row - margin - 1), max(0, col - margin - 1)
    window = band.values[r0:row + margin + 2, c0:col + margin + 2]
    return int(_codes(window, points, radius)[row - r0, col - c0])


def lbp_image(band: BandGrid, points: int = LBP_POINTS, radius: float = LBP_RADIUS) -> np.ndarray:
    """LBP code of every pixel; -1 where the neighborhood leaves the image."""
    margin = _check_params(points, radius)
    codes = np.full(band.shape, -1, dtype=np.int64)
    if band.height <= 2 * margin or band.width <= 2 * margin:
        return codes
    inner = (slice(margin, band.height - margin), slice(margin, band.width - margin))
    codes[inner] = _codes(band.values, points, radius)[inner]
    return codes


def uniform_histogram() -> np.ndarray:
    return np.full(LBP_BINS, 1.0 / LBP_BINS)


def lbp_histogram(band: BandGrid, labels: LabelMap, region: int) -> np.ndarray:
    """256-bin LBP(8,1) histogram of a region; uniform when no pixel is evaluable."""
    if band.shape != labels.shape:
        raise ArgumentError(f"band {band.shape} does not match label map {labels.shape}")
    mask = labels.mask(region)
    codes = lbp_image(band)
    selected = codes[mask & (codes >= 0)]
    if selected.size == 0:
        return uniform_histogram()
    return np.bincount(selected, minlength=LBP_BINS).astype(np.float64)


def texture_distance(hist_a, hist_b) -> float:
    """Chi-square distance (halved) between two L1-normalized histograms."""
    hist_a = np.asarray(hist_a, dtype=np.float64)
    hist_b = np.asarray(hist_b, dtype=np.float64)
    if hist_a.shape != hist_b.shape:
        raise ArgumentError(f"histograms differ in shape: {hist_a.shape} vs {hist_b.shape}")
    mass_a, mass_b = hist_a.sum(), hist_b.sum()
    if mass_a <= 0 or mass_b <= 0:
        raise DegenerateInputError("texture distance needs histograms with positive mass")
    p_a = hist_a / mass_a
    p_b = hist_b / mass_b
    return float(0.5 * np.sum((p_a - p_b) ** 2 / (p_a + p_b + _EPS)))
