# region_merging/region_stats.py
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from file_processor.raster_processor import BandGrid, MultiBandRaster
from region_merging.lbp import LBP_BINS, lbp_image, uniform_histogram
from segmentation.label_map import LabelMap
from utils.errors import ArgumentError


@dataclass(frozen=True, eq=False)
class RegionStats:
    """Incrementally combinable statistics of one region."""

    area: int
    band_sum: np.ndarray
    band_sumsq: np.ndarray
    perimeter: int
    min_row: int
    max_row: int
    min_col: int
    max_col: int
    lbp_histogram: np.ndarray
    sum_r: int
    sum_c: int
    sum_rr: int
    sum_cc: int
    sum_rc: int

    @property
    def mean(self) -> np.ndarray:
        return self.band_sum / self.area

    @property
    def variance(self) -> np.ndarray:
        return np.maximum(self.band_sumsq / self.area - self.mean ** 2, 0.0)

    @property
    def bbox_width(self) -> int:
        return self.max_col - self.min_col + 1

    @property
    def bbox_height(self) -> int:
        return self.max_row - self.min_row + 1

    @property
    def bbox_perimeter(self) -> int:
        return 2 * (self.bbox_width + self.bbox_height)

    def texture_histogram(self) -> np.ndarray:
        """LBP histogram, replaced by the uniform distribution when empty."""
        if self.lbp_histogram.sum() == 0:
            return uniform_histogram()
        return self.lbp_histogram

    def coordinate_covariance(self) -> np.ndarray:
        n = self.area
        mr, mc = self.sum_r / n, self.sum_c / n
        var_r = self.sum_rr / n - mr * mr
        var_c = self.sum_cc / n - mc * mc
        cov = self.sum_rc / n - mr * mc
        return np.array([[var_r, cov], [cov, var_c]])

    def combine(self, other: "RegionStats", shared_boundary: int) -> "RegionStats":
        """Stats of the union of two disjoint regions sharing `shared_boundary` pixel edges."""
        return RegionStats(
            area=self.area + other.area,
            band_sum=self.band_sum + other.band_sum,
            band_sumsq=self.band_sumsq + other.band_sumsq,
            perimeter=self.perimeter + other.perimeter - 2 * shared_boundary,
            min_row=min(self.min_row, other.min_row),
            max_row=max(self.max_row, other.max_row),
            min_col=min(self.min_col, other.min_col),
            max_col=max(self.max_col, other.max_col),
            lbp_histogram=self.lbp_histogram + other.lbp_histogram,
            sum_r=self.sum_r + other.sum_r,
            sum_c=self.sum_c + other.sum_c,
            sum_rr=self.sum_rr + other.sum_rr,
            sum_cc=self.sum_cc + other.sum_cc,
            sum_rc=self.sum_rc + other.sum_rc,
        )


def _int_sums(flat: np.ndarray, weights: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    np.add.at(out, flat, weights.astype(np.int64))
    return out


def compute_region_stats(
    raster: MultiBandRaster,
    labels: LabelMap,
    texture_band: Optional[BandGrid] = None,
) -> List[RegionStats]:
    """RegionStats for every region, in region-id order. LBP codes come from `texture_band` (default: last band)."""
    if raster.shape != labels.shape:
        raise ArgumentError(f"label map {labels.shape} does not match raster {raster.shape}")
    if texture_band is None:
        texture_band = raster.band(raster.bands - 1)
    grid = labels.labels.astype(np.int64)
    flat = grid.ravel()
    n = labels.n_regions
    height, width = grid.shape

    areas = np.bincount(flat, minlength=n)
    values = raster.values.reshape(raster.bands, -1).astype(np.float64)
    band_sum = np.stack([np.bincount(flat, weights=v, minlength=n) for v in values], axis=1)
    band_sumsq = np.stack([np.bincount(flat, weights=v * v, minlength=n) for v in values], axis=1)

    # perimeter = 4 * area - 2 * (edges between same-label neighbors)
    internal = np.zeros(n, dtype=np.int64)
    same_h = grid[:, :-1] == grid[:, 1:]
    same_v = grid[:-1, :] == grid[1:, :]
    internal += np.bincount(grid[:, :-1][same_h], minlength=n)
    internal += np.bincount(grid[:-1, :][same_v], minlength=n)
    perimeter = 4 * areas - 2 * internal

    rows, cols = np.mgrid[0:height, 0:width]
    rows, cols = rows.ravel(), cols.ravel()
    min_row = np.full(n, height, dtype=np.int64)
    max_row = np.full(n, -1, dtype=np.int64)
    min_col = np.full(n, width, dtype=np.int64)
    max_col = np.full(n, -1, dtype=np.int64)
    np.minimum.at(min_row, flat, rows)
    np.maximum.at(max_row, flat, rows)
    np.minimum.at(min_col, flat, cols)
    np.maximum.at(max_col, flat, cols)

    codes = lbp_image(texture_band).ravel()
    evaluable = codes >= 0
    hist = np.bincount(flat[evaluable] * LBP_BINS + codes[evaluable], minlength=n * LBP_BINS)
    hist = hist.reshape(n, LBP_BINS)

    sum_r = _int_sums(flat, rows, n)
    sum_c = _int_sums(flat, cols, n)
    sum_rr = _int_sums(flat, rows * rows, n)
    sum_cc = _int_sums(flat, cols * cols, n)
    sum_rc = _int_sums(flat, rows * cols, n)

    return [
        RegionStats(
            area=int(areas[i]),
            band_sum=band_sum[i],
            band_sumsq=band_sumsq[i],
            perimeter=int(perimeter[i]),
            min_row=int(min_row[i]),
            max_row=int(max_row[i]),
            min_col=int(min_col[i]),
            max_col=int(max_col[i]),
            lbp_histogram=hist[i].astype(np.int64),
            sum_r=int(sum_r[i]),
            sum_c=int(sum_c[i]),
            sum_rr=int(sum_rr[i]),
            sum_cc=int(sum_cc[i]),
            sum_rc=int(sum_rc[i]),
        )
        for i in range(n)
    ]
