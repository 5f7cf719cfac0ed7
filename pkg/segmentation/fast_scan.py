# segmentation/fast_scan.py
"""
Initial over-segmentation: a raster-scan partition driven by the spectral
angle between each pixel and the running mean of its left and upper
regions, followed by absorption of regions smaller than `min_size`.
"""
import heapq
import logging
import math
from typing import Dict, List, Set

import numpy as np

from file_processor.raster_processor import MultiBandRaster
from segmentation.label_map import LabelMap, adjacent_pairs, relabel_dense
from segmentation.spectral_angle import spectral_heterogeneity
from utils.errors import ArgumentError

logger = logging.getLogger(__name__)

DEFAULT_INIT_THRESHOLD = 0.08
DEFAULT_MIN_SIZE = 16


class UnionFind:
    """Disjoint sets over 0..size-1 with union by size and path halving."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> int:
        """Join the sets of x and y and return the surviving root."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return rx
        if self.size[rx] < self.size[ry] or (self.size[rx] == self.size[ry] and ry < rx):
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]
        return rx


def _pixel_angle(pixel: np.ndarray, pixel_norm: float, region_sum: np.ndarray) -> float:
    # the angle to a region mean equals the angle to its sum
    sum_norm = math.sqrt(float(region_sum @ region_sum))
    if sum_norm == 0.0:
        return math.pi / 2
    cosine = float(pixel @ region_sum) / (pixel_norm * sum_norm)
    return math.acos(min(1.0, max(-1.0, cosine)))


def fast_scan_partition(raster: MultiBandRaster, init_threshold: float = DEFAULT_INIT_THRESHOLD) -> LabelMap:
    if not init_threshold > 0:
        raise ArgumentError(f"init_threshold must be > 0, got {init_threshold}")
    height, width = raster.shape
    pixels = raster.pixel_vectors()
    norms = np.sqrt(np.einsum("ij,ij->i", pixels, pixels))
    n = height * width

    regions = UnionFind(n)
    sums = np.zeros_like(pixels)
    counts = np.zeros(n, dtype=np.int64)
    provisional = np.empty(n, dtype=np.int64)
    next_id = 0

    for idx in range(n):
        row, col = divmod(idx, width)
        candidates: List[int] = []
        if col > 0:
            candidates.append(regions.find(int(provisional[idx - 1])))
        if row > 0:
            up = regions.find(int(provisional[idx - width]))
            if up not in candidates:
                candidates.append(up)

        pixel = pixels[idx]
        target = -1
        if candidates and norms[idx] == 0.0:
            # zero spectrum: nearest region mean in Euclidean distance, left first on ties
            distances = [float(np.linalg.norm(pixel - sums[c] / counts[c])) for c in candidates]
            target = candidates[int(np.argmin(distances))]
        elif candidates:
            qualifying = []
            for order, cand in enumerate(candidates):
                angle = _pixel_angle(pixel, norms[idx], sums[cand])
                if angle <= init_threshold:
                    qualifying.append((angle, order, cand))
            if qualifying:
                qualifying.sort()
                target = qualifying[0][2]
                if len(qualifying) == 2:
                    other = qualifying[1][2]
                    merged_sum = sums[target] + sums[other]
                    merged_count = counts[target] + counts[other]
                    target = regions.union(target, other)
                    sums[target] = merged_sum
                    counts[target] = merged_count

        if target < 0:
            target = next_id
            next_id += 1
        provisional[idx] = target
        sums[target] += pixel
        counts[target] += 1

    roots = np.array([regions.find(i) for i in range(next_id)], dtype=np.int64)
    labels = relabel_dense(roots[provisional].reshape(height, width))
    result = LabelMap(labels)
    logger.info("fast scan at %.4f rad: %d regions", init_threshold, result.n_regions)
    return result


def _region_sums(labels: np.ndarray, raster: MultiBandRaster, n_regions: int) -> np.ndarray:
    flat = labels.ravel()
    return np.stack(
        [np.bincount(flat, weights=raster.values[b].ravel().astype(np.float64), minlength=n_regions)
         for b in range(raster.bands)],
        axis=1,
    )


def adaptive_merge_small(labels: LabelMap, raster: MultiBandRaster, min_size: int = DEFAULT_MIN_SIZE) -> LabelMap:
    """Absorb every region smaller than `min_size` into its spectrally closest neighbor."""
    if labels.shape != raster.shape:
        raise ArgumentError(f"label map {labels.shape} does not match raster {raster.shape}")
    dense = relabel_dense(labels.labels)
    n_regions = int(dense.max()) + 1
    if min_size <= 1 or n_regions == 1:
        return LabelMap(dense)

    sums = _region_sums(dense, raster, n_regions)
    counts = np.bincount(dense.ravel(), minlength=n_regions).astype(np.int64)
    neighbors: Dict[int, Set[int]] = {i: set() for i in range(n_regions)}
    pairs, _ = adjacent_pairs(dense)
    for a, b in pairs:
        neighbors[int(a)].add(int(b))
        neighbors[int(b)].add(int(a))

    parent = np.arange(n_regions)
    alive = n_regions
    queue = [(int(counts[i]), i) for i in range(n_regions) if counts[i] < min_size]
    heapq.heapify(queue)
    while queue and alive > 1:
        area, region = heapq.heappop(queue)
        if parent[region] != region or area != counts[region] or counts[region] >= min_size:
            continue
        mean = sums[region] / counts[region]
        best = min(
            neighbors[region],
            key=lambda nb: (spectral_heterogeneity(mean, sums[nb] / counts[nb]), nb),
        )
        sums[best] += sums[region]
        counts[best] += counts[region]
        parent[region] = best
        for nb in neighbors.pop(region):
            neighbors[nb].discard(region)
            if nb != best:
                neighbors[nb].add(best)
                neighbors[best].add(nb)
        alive -= 1
        if counts[best] < min_size:
            heapq.heappush(queue, (int(counts[best]), best))

    # resolve absorption chains
    for i in range(n_regions):
        root = i
        while parent[root] != root:
            root = parent[root]
        parent[i] = root
    result = LabelMap(relabel_dense(parent[dense]))
    logger.info("adaptive merge (min_size=%d): %d -> %d regions", min_size, n_regions, result.n_regions)
    return result
