# segmentation/label_map.py
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from skimage.measure import label as connected_components

from utils.errors import ArgumentError


def relabel_dense(labels: np.ndarray) -> np.ndarray:
    """Map arbitrary non-negative ids to 0..R-1 in order of first row-major occurrence."""
    flat = np.asarray(labels).ravel()
    _, first, inverse = np.unique(flat, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.ravel()].reshape(np.shape(labels)).astype(np.int32)


def adjacent_pairs(labels: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Unordered 4-adjacent region pairs and their shared boundary length.

    Returns (pairs, counts): pairs is (E, 2) with pairs[:, 0] < pairs[:, 1],
    sorted lexicographically; counts[i] is the number of pixel edges between them.
    """
    labels = np.asarray(labels, dtype=np.int64)
    a = np.concatenate([labels[:, :-1].ravel(), labels[:-1, :].ravel()])
    b = np.concatenate([labels[:, 1:].ravel(), labels[1:, :].ravel()])
    differ = a != b
    lo = np.minimum(a[differ], b[differ])
    hi = np.maximum(a[differ], b[differ])
    if lo.size == 0:
        return np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=np.int64)
    n = int(labels.max()) + 1
    keys, counts = np.unique(lo * n + hi, return_counts=True)
    pairs = np.stack([keys // n, keys % n], axis=1)
    return pairs, counts


@dataclass(frozen=True, eq=False)
class LabelMap:
    """Per-pixel region id; a total partition into 4-connected, densely numbered regions."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 2 or labels.size == 0:
            raise ArgumentError(f"label map must be a non-empty 2-D array, got shape {labels.shape}")
        if not np.issubdtype(labels.dtype, np.integer):
            raise ArgumentError("label map must hold integer region ids")
        labels = np.ascontiguousarray(labels, dtype=np.int32)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_array(cls, labels: np.ndarray) -> "LabelMap":
        """Build from any integer map, relabeling densely."""
        return cls(relabel_dense(labels))

    @property
    def height(self) -> int:
        return self.labels.shape[0]

    @property
    def width(self) -> int:
        return self.labels.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.labels.shape

    @property
    def n_regions(self) -> int:
        return int(self.labels.max()) + 1

    def areas(self) -> np.ndarray:
        return np.bincount(self.labels.ravel(), minlength=self.n_regions)

    def mask(self, region: int) -> np.ndarray:
        self.check_region(region)
        return self.labels == region

    def check_region(self, region: int) -> None:
        if not 0 <= region < self.n_regions:
            raise ArgumentError(f"unknown region id {region} (map has {self.n_regions} regions)")

    def is_dense(self) -> bool:
        if self.labels.min() < 0:
            return False
        return np.unique(self.labels).size == self.n_regions

    def is_connected(self) -> bool:
        """Every region forms a single 4-connected component."""
        components = connected_components(self.labels, connectivity=1, background=-1)
        return int(components.max()) == np.unique(self.labels).size

    def validate(self) -> "LabelMap":
        if not self.is_dense():
            raise ArgumentError("region ids are not dense 0..R-1")
        if not self.is_connected():
            raise ArgumentError("a region is not 4-connected")
        return self

    def __eq__(self, other) -> bool:
        if not isinstance(other, LabelMap):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)
