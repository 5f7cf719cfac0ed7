import numpy as np
import pytest

from file_processor.raster_processor import MultiBandRaster, compute_ndvi, load_raster, save_raster
from utils.errors import ArgumentError, DataError, RasterFormatError, RasterTruncationError


def test_save_load_is_bit_exact(tmp_path, rng):
    raster = MultiBandRaster(rng.normal(size=(3, 5, 7)))
    path = tmp_path / "scene.qras"
    save_raster(raster, path)
    assert load_raster(path) == raster


def test_header_and_payload_layout(tmp_path):
    raster = MultiBandRaster(np.arange(12, dtype=np.float32).reshape(2, 2, 3))
    path = tmp_path / "tiny.qras"
    save_raster(raster, path)
    blob = path.read_bytes()
    assert blob.startswith(b"QRAS1 3 2 2\n")
    payload = np.frombuffer(blob[len(b"QRAS1 3 2 2\n"):], dtype="<f4")
    # band-sequential, each band row-major
    assert payload.tolist() == list(range(12))


def test_truncated_payload(tmp_path):
    path = tmp_path / "short.qras"
    path.write_bytes(b"QRAS1 2 2 1\n" + b"\x00" * 12)
    with pytest.raises(RasterTruncationError):
        load_raster(path)


@pytest.mark.parametrize("header", [b"QRAS2 2 2 1\n", b"QRAS1 2 2\n", b"QRAS1 2 x 1\n", b"QRAS1 0 2 1\n"])
def test_bad_header(tmp_path, header):
    path = tmp_path / "bad.qras"
    path.write_bytes(header + b"\x00" * 16)
    with pytest.raises(RasterFormatError):
        load_raster(path)


def test_missing_file_is_a_data_error(tmp_path):
    with pytest.raises(DataError):
        load_raster(tmp_path / "nope.qras")


def test_non_finite_values_rejected():
    values = np.ones((1, 2, 2))
    values[0, 1, 1] = np.nan
    with pytest.raises(DataError):
        MultiBandRaster(values)


def test_band_index_checked():
    raster = MultiBandRaster(np.ones((2, 3, 3)))
    with pytest.raises(ArgumentError):
        raster.band(2)


def test_ndvi_values():
    values = np.zeros((4, 1, 3))
    values[3] = [0.5, 0.0, 0.2]  # nir
    values[2] = [0.1, 0.0, 0.2]  # red
    ndvi = compute_ndvi(MultiBandRaster(values), nir_index=3, red_index=2)
    assert ndvi.values[0, 0] == pytest.approx(0.4 / 0.6, rel=1e-6)
    assert ndvi.values[0, 1] == 0.0
    assert ndvi.values[0, 2] == pytest.approx(0.0, abs=1e-7)


def test_ndvi_is_scale_invariant(rng):
    values = rng.uniform(0.01, 1.0, size=(4, 6, 6))
    a = compute_ndvi(MultiBandRaster(values), 3, 2)
    b = compute_ndvi(MultiBandRaster(values * 4.0), 3, 2)
    np.testing.assert_allclose(a.values, b.values, rtol=1e-6)
    assert np.all(np.abs(a.values) <= 1.0)


def test_ndvi_band_out_of_range():
    with pytest.raises(ArgumentError):
        compute_ndvi(MultiBandRaster(np.ones((2, 2, 2))), nir_index=5, red_index=0)
