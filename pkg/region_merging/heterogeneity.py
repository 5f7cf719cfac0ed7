# region_merging/heterogeneity.py
"""Merge cost h = w_spec*h_spec + w_texture*h_texture + w_shape*h_shape."""
import math

from region_merging.lbp import texture_distance
from region_merging.region_stats import RegionStats
from segmentation.spectral_angle import spectral_heterogeneity
from utils.config import HeterogeneityWeights
from utils.errors import ArgumentError


def h_compact(stats: RegionStats) -> float:
    return stats.perimeter / math.sqrt(stats.area)


def h_smooth(stats: RegionStats) -> float:
    return stats.perimeter / stats.bbox_perimeter


def shape_heterogeneity_delta(
    a: RegionStats,
    b: RegionStats,
    w_compact: float = 0.5,
    w_smooth: float = 0.5,
    shared_boundary: int = 0,
) -> float:
    """Area-weighted increase of compactness and smoothness caused by merging a and b."""
    if shared_boundary <= 0:
        raise ArgumentError("shape heterogeneity needs adjacent regions (shared boundary > 0)")
    merged = a.combine(b, shared_boundary)
    d_compact = merged.area * h_compact(merged) - (a.area * h_compact(a) + b.area * h_compact(b))
    d_smooth = merged.area * h_smooth(merged) - (a.area * h_smooth(a) + b.area * h_smooth(b))
    return w_compact * d_compact + w_smooth * d_smooth


def merge_cost(a: RegionStats, b: RegionStats, weights: HeterogeneityWeights, shared_boundary: int) -> float:
    h_spec = spectral_heterogeneity(a.mean, b.mean)
    h_texture = texture_distance(a.texture_histogram(), b.texture_histogram())
    delta = shape_heterogeneity_delta(a, b, weights.w_compact, weights.w_smooth, shared_boundary)
    # a merge that improves the shape is not rewarded below zero
    h_shape = max(0.0, delta) / (a.area + b.area)
    return weights.w_spec * h_spec + weights.w_texture * h_texture + weights.w_shape * h_shape
