# region_merging/rag.py
"""
Region adjacency graph with a globally greedy minimum-heterogeneity merge:
the cheapest edge is merged while its cost stays below the scale parameter.
"""
import heapq
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

import numpy as np

from file_processor.raster_processor import BandGrid, MultiBandRaster
from region_merging.heterogeneity import merge_cost
from region_merging.region_stats import RegionStats, compute_region_stats
from segmentation.label_map import LabelMap, adjacent_pairs, relabel_dense
from utils.config import HeterogeneityWeights
from utils.errors import ArgumentError

logger = logging.getLogger(__name__)

DEFAULT_SCALE = 20.0
Edge = Tuple[int, int]


def _edge(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass
class EdgeData:
    shared_boundary: int
    cost: float


class Rag:
    """Nodes are live regions (by initial id of their smallest member); edges carry the merge cost."""

    def __init__(
        self,
        labels: LabelMap,
        raster: MultiBandRaster,
        weights: Optional[HeterogeneityWeights] = None,
        scale: float = DEFAULT_SCALE,
        texture_band: Optional[BandGrid] = None,
    ):
        if scale < 0 or math.isnan(scale):
            raise ArgumentError(f"scale must be >= 0, got {scale}")
        self.weights = weights or HeterogeneityWeights()
        self.scale = scale
        self.initial = relabel_dense(labels.labels)
        dense = LabelMap(self.initial)
        self.nodes: Dict[int, RegionStats] = dict(enumerate(compute_region_stats(raster, dense, texture_band)))
        self.parent = np.arange(len(self.nodes))
        self.neighbors: Dict[int, Set[int]] = {i: set() for i in self.nodes}
        self.edges: Dict[Edge, EdgeData] = {}
        self._heap: List[Tuple[float, int, int]] = []
        pairs, shared = adjacent_pairs(self.initial)
        for (a, b), s in zip(pairs.tolist(), shared.tolist()):
            self.neighbors[a].add(b)
            self.neighbors[b].add(a)
            self.edges[(a, b)] = EdgeData(shared_boundary=int(s), cost=0.0)
            self._refresh(a, b)

    @property
    def n_regions(self) -> int:
        return len(self.nodes)

    def cost(self, a: int, b: int) -> float:
        return merge_cost(self.nodes[a], self.nodes[b], self.weights, self.edges[_edge(a, b)].shared_boundary)

    def _refresh(self, a: int, b: int) -> None:
        key = _edge(a, b)
        data = self.edges[key]
        data.cost = self.cost(*key)
        heapq.heappush(self._heap, (data.cost, key[0], key[1]))

    def cheapest_edge(self) -> Optional[Tuple[float, int, int]]:
        """Minimum-cost live edge; ties go to the smaller (min-id, max-id) pair."""
        while self._heap:
            cost, a, b = self._heap[0]
            data = self.edges.get((a, b))
            if data is not None and data.cost == cost:
                return cost, a, b
            heapq.heappop(self._heap)
        return None

    def merge(self, a: int, b: int) -> int:
        """Merge two adjacent regions; the smaller id survives."""
        keep, drop = _edge(a, b)
        shared = self.edges.pop((keep, drop)).shared_boundary
        self.nodes[keep] = self.nodes[keep].combine(self.nodes.pop(drop), shared)
        self.parent[drop] = keep
        self.neighbors[keep].discard(drop)
        for nb in self.neighbors.pop(drop):
            if nb == keep:
                continue
            moved = self.edges.pop(_edge(drop, nb)).shared_boundary
            self.neighbors[nb].discard(drop)
            key = _edge(keep, nb)
            if key in self.edges:
                self.edges[key].shared_boundary += moved
            else:
                self.edges[key] = EdgeData(shared_boundary=moved, cost=0.0)
                self.neighbors[keep].add(nb)
                self.neighbors[nb].add(keep)
        for nb in self.neighbors[keep]:
            self._refresh(keep, nb)
        return keep

    def run(self) -> int:
        """Greedy merging until the cheapest edge costs at least `scale`; returns the merge count."""
        merges = 0
        while True:
            best = self.cheapest_edge()
            if best is None or not best[0] < self.scale:
                break
            self.merge(best[1], best[2])
            merges += 1
        return merges

    def label_map(self) -> LabelMap:
        roots = self.parent.copy()
        for i in range(len(roots)):
            r = i
            while roots[r] != r:
                r = roots[r]
            roots[i] = r
        return LabelMap(relabel_dense(roots[self.initial]))


def merge_regions(
    labels: LabelMap,
    raster: MultiBandRaster,
    weights: Optional[HeterogeneityWeights] = None,
    scale: float = DEFAULT_SCALE,
    texture_band: Optional[BandGrid] = None,
) -> LabelMap:
    if labels.shape != raster.shape:
        raise ArgumentError(f"label map {labels.shape} does not match raster {raster.shape}")
    rag = Rag(labels, raster, weights, scale, texture_band)
    before = rag.n_regions
    merges = rag.run()
    result = rag.label_map()
    logger.info("RAG merge at scale %g: %d -> %d regions (%d merges)", scale, before, result.n_regions, merges)
    return result
