import numpy as np
import pytest

from file_processor.label_map_processor import (
    DAMAGED_COLOR,
    INTACT_COLOR,
    LabelMapProcessor,
    load_label_map,
    load_ppm,
    render_boundaries,
    render_classification_overlay,
    save_label_map,
    save_ppm,
)
from file_processor.raster_processor import MultiBandRaster
from segmentation.label_map import LabelMap
from utils.errors import DataError, RasterFormatError, RasterTruncationError


def test_pgm_round_trip(tmp_path):
    labels = LabelMap(np.array([[0, 0, 1], [2, 2, 1]]))
    path = tmp_path / "labels.pgm"
    save_label_map(labels, path)
    assert path.read_bytes().startswith(b"P5\n3 2\n65535\n")
    assert load_label_map(path) == labels
    assert LabelMapProcessor.process(str(path)) == labels


def test_samples_are_big_endian(tmp_path):
    path = tmp_path / "labels.pgm"
    save_label_map(LabelMap(np.array([[0, 1]])), path)
    assert path.read_bytes()[-4:] == b"\x00\x00\x00\x01"


def test_header_comments_are_skipped(tmp_path):
    path = tmp_path / "commented.pgm"
    path.write_bytes(b"P5\n# written by hand\n2 1\n65535\n" + np.array([1, 0], dtype=">u2").tobytes())
    assert load_label_map(path).labels.tolist() == [[1, 0]]


def test_ascii_pgm_rejected(tmp_path):
    path = tmp_path / "ascii.pgm"
    path.write_bytes(b"P2\n2 1\n65535\n0 1\n")
    with pytest.raises(RasterFormatError):
        load_label_map(path)


def test_unsupported_maxval_rejected(tmp_path):
    path = tmp_path / "eight_bit.pgm"
    path.write_bytes(b"P5\n2 1\n255\n\x00\x01")
    with pytest.raises(RasterFormatError):
        load_label_map(path)


def test_truncated_pgm(tmp_path):
    path = tmp_path / "short.pgm"
    path.write_bytes(b"P5\n2 2\n65535\n\x00\x00\x00\x01")
    with pytest.raises(RasterTruncationError):
        load_label_map(path)


def test_missing_pgm(tmp_path):
    with pytest.raises(DataError):
        load_label_map(tmp_path / "missing.pgm")


def test_ppm_round_trip(tmp_path, rng):
    rgb = rng.integers(0, 256, size=(4, 5, 3), dtype=np.uint8)
    path = tmp_path / "image.ppm"
    save_ppm(rgb, path)
    assert path.read_bytes().startswith(b"P6")
    np.testing.assert_array_equal(load_ppm(path), rgb)


def test_boundaries_drawn_in_red(quadrant_scene):
    raster, truth, _ = quadrant_scene
    rgb = render_boundaries(raster, truth)
    assert rgb.shape == (16, 16, 3) and rgb.dtype == np.uint8
    red = np.all(rgb == [255, 0, 0], axis=2)
    # outlines sit along the quadrant seams
    assert red[7, 7] and red[8, 8]
    assert not red[2, 2]


def test_classification_overlay_colors():
    raster = MultiBandRaster(np.linspace(0.1, 0.9, 3 * 2 * 3).reshape(3, 2, 3))
    labels = LabelMap(np.array([[0, 0, 1], [2, 2, 1]]))
    rgb = render_classification_overlay(raster, labels, [1, 0, 3], damaged_class=1, intact_class=0)
    assert tuple(rgb[0, 0]) == DAMAGED_COLOR
    assert tuple(rgb[0, 2]) == INTACT_COLOR
    other = rgb[1, 0]
    assert other[0] == other[1] == other[2]
