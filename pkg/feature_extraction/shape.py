# feature_extraction/shape.py
import math
from typing import NamedTuple

import numpy as np

from region_merging.region_stats import RegionStats

# variance of a single unit pixel along one axis
PIXEL_VARIANCE = 1.0 / 12.0


class ShapeFeatures(NamedTuple):
    area: float
    shape_index: float
    length_width_ratio: float
    rectangular_fit: float
    roundness: float
    density: float


def principal_variances(stats: RegionStats):
    """Eigenvalues (l1 >= l2 >= 0) of the pixel-coordinate covariance."""
    l2, l1 = np.linalg.eigvalsh(stats.coordinate_covariance())
    return max(float(l1), 0.0), max(float(l2), 0.0)


def shape_features(stats: RegionStats) -> ShapeFeatures:
    area = stats.area
    perimeter = stats.perimeter
    l1, l2 = principal_variances(stats)
    # only the minor axis is floored, at one pixel's variance
    minor = max(l2, PIXEL_VARIANCE)
    return ShapeFeatures(
        area=float(area),
        shape_index=perimeter / (4.0 * math.sqrt(area)),
        length_width_ratio=math.sqrt(max(l1, minor) / minor),
        rectangular_fit=area / (stats.bbox_width * stats.bbox_height),
        roundness=4.0 * math.pi * area / perimeter ** 2,
        density=math.sqrt(area) / (1.0 + math.sqrt(l1 + l2)),
    )
