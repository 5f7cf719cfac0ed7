# conftest.py
import numpy as np
import pytest

from data_synthesizer import RegionSpec, SceneSpec, generate_scene
from file_processor.raster_processor import MultiBandRaster
from segmentation.label_map import LabelMap

QUADRANT_SPECTRA = [
    [0.9, 0.1, 0.1],
    [0.1, 0.9, 0.1],
    [0.1, 0.1, 0.9],
    [0.6, 0.6, 0.1],
]


def quadrant_spec(size: int = 16, noise_std: float = 0.0, seed: int = 0) -> SceneSpec:
    half = size // 2
    corners = [(0, 0), (0, half), (half, 0), (half, half)]
    return SceneSpec(
        width=size,
        height=size,
        bands=3,
        seed=seed,
        noise_std=noise_std,
        regions=[
            RegionSpec(row=r, col=c, height=half, width=half, spectrum=s, class_id=i % 2)
            for i, ((r, c), s) in enumerate(zip(corners, QUADRANT_SPECTRA))
        ],
    )


def random_raster(rng: np.random.Generator, bands: int = 3, height: int = 12, width: int = 12) -> MultiBandRaster:
    return MultiBandRaster(rng.uniform(0.05, 1.0, size=(bands, height, width)))


def numeric_gradient(f, param: np.ndarray, index, h: float = 1e-5) -> float:
    """Central difference of f() with respect to param[index], restoring the value afterwards."""
    original = param[index]
    param[index] = original + h
    up = f()
    param[index] = original - h
    down = f()
    param[index] = original
    return (up - down) / (2 * h)


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(1e-6, abs(analytic), abs(numeric))


def assert_valid_partition(labels: LabelMap) -> None:
    """Dense ids, every region one 4-connected component."""
    assert labels.labels.min() == 0
    assert np.unique(labels.labels).size == labels.n_regions
    assert labels.is_connected()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def quadrant_scene():
    """16x16, 3 bands, four noise-free quadrants with distinct spectral directions."""
    return generate_scene(quadrant_spec())
