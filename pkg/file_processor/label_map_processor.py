# file_processor/label_map_processor.py
"""
Label maps as binary 16-bit PGM (P5, maxval 65535, big-endian samples) and
RGB visualizations as binary PPM (P6).
"""
import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from PIL import Image
from skimage.segmentation import mark_boundaries

from file_processor.raster_processor import MultiBandRaster
from segmentation.label_map import LabelMap
from utils.errors import ArgumentError, DataError, RasterFormatError, RasterTruncationError, RasterWriteError

logger = logging.getLogger(__name__)

PGM_MAXVAL = 65535
_SAMPLE_DTYPE = np.dtype(">u2")

DAMAGED_COLOR = (255, 0, 0)
INTACT_COLOR = (255, 255, 0)
BOUNDARY_COLOR = (1.0, 0.0, 0.0)


def _header_tokens(blob: bytes, count: int, path) -> Tuple[list, int]:
    """First `count` whitespace-separated header tokens (skipping # comments) and the payload offset."""
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(blob) and blob[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(blob):
            raise RasterFormatError(f"{path}: truncated PGM header")
        if blob[pos:pos + 1] == b"#":
            end = blob.find(b"\n", pos)
            pos = len(blob) if end < 0 else end + 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos:pos + 1].isspace():
            pos += 1
        tokens.append(blob[start:pos])
    # exactly one whitespace byte separates the header from the samples
    return tokens, pos + 1


def load_label_map(path) -> LabelMap:
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except FileNotFoundError as e:
        raise DataError(f"label map not found: {path}") from e
    tokens, offset = _header_tokens(blob, 4, path)
    if tokens[0] != b"P5":
        raise RasterFormatError(f"{path}: expected a binary P5 PGM, got {tokens[0][:8]!r}")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError as e:
        raise RasterFormatError(f"{path}: non-integer PGM header field") from e
    if width < 1 or height < 1 or maxval != PGM_MAXVAL:
        raise RasterFormatError(f"{path}: unsupported PGM geometry {width}x{height}, maxval {maxval}")
    payload = blob[offset:]
    expected = width * height * _SAMPLE_DTYPE.itemsize
    if len(payload) != expected:
        raise RasterTruncationError(f"{path}: payload has {len(payload)} bytes, header declares {expected}")
    values = np.frombuffer(payload, dtype=_SAMPLE_DTYPE).reshape(height, width)
    return LabelMap(values.astype(np.int32))


def save_label_map(labels: LabelMap, path) -> None:
    if labels.n_regions - 1 > PGM_MAXVAL:
        raise ArgumentError(f"{labels.n_regions} regions do not fit 16-bit PGM samples")
    header = f"P5\n{labels.width} {labels.height}\n{PGM_MAXVAL}\n".encode("ascii")
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(labels.labels.astype(_SAMPLE_DTYPE).tobytes(order="C"))
    except OSError as e:
        raise RasterWriteError(f"cannot write label map to {path}: {e}") from e
    logger.debug("saved %d-region label map to %s", labels.n_regions, path)


def save_ppm(rgb: np.ndarray, path) -> None:
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[2] != 3:
        raise ArgumentError(f"RGB image must be (H, W, 3), got {rgb.shape}")
    try:
        Image.fromarray(np.ascontiguousarray(rgb, dtype=np.uint8)).save(path, format="PPM")
    except OSError as e:
        raise RasterWriteError(f"cannot write PPM to {path}: {e}") from e


def load_ppm(path) -> np.ndarray:
    with Image.open(path) as image:
        return np.asarray(image.convert("RGB"))


def scene_grayscale(raster: MultiBandRaster) -> np.ndarray:
    """Band-mean brightness stretched to [0, 1]."""
    gray = raster.values.astype(np.float64).mean(axis=0)
    lo, hi = gray.min(), gray.max()
    if hi == lo:
        return np.full(gray.shape, 0.5)
    return (gray - lo) / (hi - lo)


def _to_rgb8(image: np.ndarray) -> np.ndarray:
    return np.round(np.clip(image, 0.0, 1.0) * 255).astype(np.uint8)


def render_boundaries(raster: MultiBandRaster, labels: LabelMap) -> np.ndarray:
    """Grayscale scene with region outlines drawn in red."""
    if raster.shape != labels.shape:
        raise ArgumentError(f"label map {labels.shape} does not match raster {raster.shape}")
    gray = scene_grayscale(raster)
    # shifted so region 0 is not treated as background
    outlined = mark_boundaries(np.dstack([gray] * 3), labels.labels + 1, color=BOUNDARY_COLOR, mode="inner")
    return _to_rgb8(outlined)


def render_classification_overlay(
    raster: MultiBandRaster,
    labels: LabelMap,
    region_classes: Sequence[int],
    damaged_class: int = 1,
    intact_class: Optional[int] = 0,
) -> np.ndarray:
    """
    Damaged regions in red, intact buildings in yellow, every other class
    shows the grayscale scene.
    """
    region_classes = np.asarray(region_classes, dtype=np.int64)
    if region_classes.shape != (labels.n_regions,):
        raise ArgumentError(f"expected {labels.n_regions} region classes, got {region_classes.shape}")
    if raster.shape != labels.shape:
        raise ArgumentError(f"label map {labels.shape} does not match raster {raster.shape}")
    rgb = np.repeat(_to_rgb8(scene_grayscale(raster))[:, :, None], 3, axis=2)
    palette = {damaged_class: DAMAGED_COLOR}
    if intact_class is not None:
        palette[intact_class] = INTACT_COLOR
    pixel_classes = region_classes[labels.labels]
    for cls, color in palette.items():
        rgb[pixel_classes == cls] = color
    return rgb


class LabelMapProcessor:
    """Reads 16-bit PGM label maps."""

    @staticmethod
    def process(file_path: str) -> LabelMap:
        return load_label_map(file_path)
