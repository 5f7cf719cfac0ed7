import math

import numpy as np
import pytest

from file_processor.raster_processor import BandGrid
from region_merging.lbp import LBP_BINS, lbp_code, lbp_histogram, lbp_image, texture_distance
from segmentation.label_map import LabelMap
from utils.errors import ArgumentError, DegenerateInputError, OutOfDomainError


def _bilinear(values, y, x):
    y0, x0 = math.floor(y), math.floor(x)
    ty, tx = y - y0, x - x0
    total = 0.0
    for dy, wy in ((0, 1 - ty), (1, ty)):
        for dx, wx in ((0, 1 - tx), (1, tx)):
            if wy * wx:
                total += wy * wx * values[y0 + dy, x0 + dx]
    return total


def _brute_force_code(values, row, col, points=8, radius=1.0):
    code = 0
    for p in range(points):
        angle = 2 * math.pi * p / points
        y = row - radius * math.sin(angle)
        x = col + radius * math.cos(angle)
        y, x = round(y, 10), round(x, 10)
        if _bilinear(values, y, x) - values[row, col] >= 0:
            code |= 1 << p
    return code


def test_constant_patch_sets_every_bit():
    assert lbp_code(BandGrid(np.full((3, 3), 4.0)), 1, 1) == 255


def test_peak_clears_every_bit():
    values = np.zeros((3, 3))
    values[1, 1] = 1.0
    assert lbp_code(BandGrid(values), 1, 1) == 0


def test_worked_patch():
    values = np.array([[5.0, 5.0, 5.0], [1.0, 3.0, 9.0], [2.0, 2.0, 7.0]])
    # east, north-east, north, north-west and south-east reach the centre value
    assert lbp_code(BandGrid(values), 1, 1) == 0b10001111 == 143


def test_border_pixel_out_of_domain():
    with pytest.raises(OutOfDomainError):
        lbp_code(BandGrid(np.ones((3, 3))), 0, 1)


def test_invalid_parameters():
    with pytest.raises(ArgumentError):
        lbp_code(BandGrid(np.ones((5, 5))), 2, 2, points=0)
    with pytest.raises(ArgumentError):
        lbp_code(BandGrid(np.ones((5, 5))), 2, 2, radius=0)


def test_codes_match_bit_by_bit_oracle(rng):
    for _ in range(100):
        values = rng.uniform(size=(5, 5))
        row, col = rng.integers(1, 4, size=2)
        assert lbp_code(BandGrid(values), int(row), int(col)) == _brute_force_code(values, row, col)


def test_image_marks_border_unevaluable(rng):
    codes = lbp_image(BandGrid(rng.uniform(size=(6, 7))))
    assert np.all(codes[0] == -1) and np.all(codes[:, -1] == -1)
    assert np.all(codes[1:-1, 1:-1] >= 0)


def test_image_codes_match_single_pixel_codes(rng):
    band = BandGrid(rng.uniform(size=(9, 8)))
    codes = lbp_image(band, points=8, radius=2)
    for row in range(2, 7):
        for col in range(2, 6):
            assert codes[row, col] == lbp_code(band, row, col, points=8, radius=2)
    assert np.all(codes[:2] == -1) and np.all(codes[:, -2:] == -1)


def test_codes_ignore_a_constant_offset(rng):
    values = rng.random((16, 16))
    codes = lbp_image(BandGrid(values))
    assert np.array_equal(lbp_image(BandGrid(values + 10.0)), codes)
    assert np.array_equal(lbp_image(BandGrid(values * 2.0)), codes)


def test_histogram_of_constant_region():
    labels = LabelMap(np.zeros((5, 5), dtype=int))
    hist = lbp_histogram(BandGrid(np.full((5, 5), 2.0)), labels, 0)
    assert hist[255] == 9 and hist.sum() == 9


def test_border_region_gets_uniform_histogram():
    labels = np.zeros((4, 4), dtype=int)
    labels[0, 0] = 1
    labels = LabelMap(labels)
    hist = lbp_histogram(BandGrid(np.ones((4, 4))), labels, 1)
    np.testing.assert_allclose(hist, np.full(LBP_BINS, 1 / LBP_BINS))


def test_histogram_matches_per_pixel_accumulation(rng):
    values = rng.uniform(size=(16, 16))
    labels = LabelMap(np.zeros((16, 16), dtype=int))
    expected = np.zeros(LBP_BINS)
    for r in range(1, 15):
        for c in range(1, 15):
            expected[_brute_force_code(values, r, c)] += 1
    np.testing.assert_array_equal(lbp_histogram(BandGrid(values), labels, 0), expected)


def test_texture_distance_identity_and_symmetry(rng):
    a, b = rng.uniform(size=(2, LBP_BINS))
    assert texture_distance(a, 3 * a) == pytest.approx(0.0, abs=1e-12)
    assert texture_distance(a, b) == pytest.approx(texture_distance(b, a))


def test_texture_distance_disjoint_support():
    a = np.zeros(LBP_BINS)
    b = np.zeros(LBP_BINS)
    a[0] = 5
    b[255] = 2
    assert texture_distance(a, b) == pytest.approx(1.0, abs=1e-9)


def test_texture_distance_matches_direct_sum(rng):
    for _ in range(100):
        a, b = rng.integers(0, 5, size=(2, 16)).astype(float) + 0.5
        pa, pb = a / a.sum(), b / b.sum()
        expected = 0.5 * sum((x - y) ** 2 / (x + y + 1e-12) for x, y in zip(pa, pb))
        assert texture_distance(a, b) == pytest.approx(expected, rel=1e-9)


def test_texture_distance_needs_mass():
    with pytest.raises(DegenerateInputError):
        texture_distance(np.zeros(4), np.ones(4))
