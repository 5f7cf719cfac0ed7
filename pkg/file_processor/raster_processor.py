# file_processor/raster_processor.py
"""
Multi-band raster container and the QRAS file format.

QRAS layout: one ASCII line `QRAS1 <width> <height> <bands>\\n` followed by
width*height*bands little-endian float32 values, band-sequential, each band
row-major.
"""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from utils.errors import (
    ArgumentError,
    DataError,
    RasterFormatError,
    RasterTruncationError,
    RasterWriteError,
)

logger = logging.getLogger(__name__)

MAGIC = "QRAS1"
_PAYLOAD_DTYPE = np.dtype("<f4")


@dataclass(frozen=True, eq=False)
class MultiBandRaster:
    """B x H x W reflectance grid; values are stored as float32."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim != 3:
            raise ArgumentError(f"raster values must be 3-D (bands, height, width), got {values.ndim}-D")
        bands, height, width = values.shape
        if bands < 1 or height < 1 or width < 1:
            raise ArgumentError(f"raster dimensions must be >= 1, got {values.shape}")
        values = np.ascontiguousarray(values, dtype=np.float32)
        if not np.all(np.isfinite(values)):
            raise DataError("raster contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def bands(self) -> int:
        return self.values.shape[0]

    @property
    def height(self) -> int:
        return self.values.shape[1]

    @property
    def width(self) -> int:
        return self.values.shape[2]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    def band(self, index: int) -> "BandGrid":
        if not 0 <= index < self.bands:
            raise ArgumentError(f"band index {index} out of range for {self.bands} bands")
        return BandGrid(self.values[index].astype(np.float64))

    def pixel_vectors(self) -> np.ndarray:
        """(H*W, B) float64 matrix of spectral vectors in row-major pixel order."""
        return self.values.reshape(self.bands, -1).T.astype(np.float64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiBandRaster):
            return NotImplemented
        return self.values.shape == other.values.shape and np.array_equal(
            self.values.view(np.uint32), other.values.view(np.uint32)
        )


@dataclass(frozen=True, eq=False)
class BandGrid:
    """Single real value per pixel (NDVI, NIR, ...)."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ArgumentError(f"band grid must be 2-D, got {values.ndim}-D")
        object.__setattr__(self, "values", values)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.values.shape


class RasterProcessor:
    """Reads and writes QRAS rasters."""

    @staticmethod
    def process(file_path: str) -> MultiBandRaster:
        return load_raster(file_path)


def _parse_header(line: bytes, path) -> Tuple[int, int, int]:
    try:
        parts = line.decode("ascii").split()
    except UnicodeDecodeError as e:
        raise RasterFormatError(f"{path}: header is not ASCII") from e
    if len(parts) != 4 or parts[0] != MAGIC:
        raise RasterFormatError(f"{path}: expected '{MAGIC} <width> <height> <bands>', got {line[:64]!r}")
    try:
        width, height, bands = (int(p) for p in parts[1:])
    except ValueError as e:
        raise RasterFormatError(f"{path}: non-integer dimension in header") from e
    if width < 1 or height < 1 or bands < 1:
        raise RasterFormatError(f"{path}: dimensions must be >= 1")
    return width, height, bands


def load_raster(path) -> MultiBandRaster:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except FileNotFoundError as e:
        raise DataError(f"raster not found: {path}") from e
    newline = blob.find(b"\n")
    if newline < 0:
        raise RasterFormatError(f"{path}: missing header line")
    width, height, bands = _parse_header(blob[:newline], path)
    expected = width * height * bands * _PAYLOAD_DTYPE.itemsize
    payload = blob[newline + 1:]
    if len(payload) != expected:
        raise RasterTruncationError(
            f"{path}: payload has {len(payload)} bytes, header declares {expected}"
        )
    values = np.frombuffer(payload, dtype=_PAYLOAD_DTYPE).reshape(bands, height, width)
    if not np.all(np.isfinite(values)):
        raise DataError(f"{path}: raster contains non-finite values")
    logger.debug("loaded %dx%dx%d raster from %s", width, height, bands, path)
    return MultiBandRaster(values.astype(np.float32))


def save_raster(raster: MultiBandRaster, path) -> None:
    header = f"{MAGIC} {raster.width} {raster.height} {raster.bands}\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(raster.values.astype(_PAYLOAD_DTYPE, copy=False).tobytes(order="C"))
    except OSError as e:
        raise RasterWriteError(f"cannot write raster to {path}: {e}") from e
    logger.debug("saved %dx%dx%d raster to %s", raster.width, raster.height, raster.bands, path)


def compute_ndvi(raster: MultiBandRaster, nir_index: int, red_index: int) -> BandGrid:
    """(NIR - RED) / (NIR + RED) per pixel; 0 where NIR + RED = 0."""
    for name, index in (("nir_index", nir_index), ("red_index", red_index)):
        if not 0 <= index < raster.bands:
            raise ArgumentError(f"{name}={index} out of range for {raster.bands} bands")
    nir = raster.values[nir_index].astype(np.float64)
    red = raster.values[red_index].astype(np.float64)
    total = nir + red
    safe = np.where(total == 0, 1.0, total)
    ndvi = np.where(total == 0, 0.0, (nir - red) / safe)
    # negative raw counts could push the ratio outside [-1, 1]
    return BandGrid(np.clip(ndvi, -1.0, 1.0))
