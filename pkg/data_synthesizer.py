# data_synthesizer.py
# -----------------------------------------
# Seeded synthetic multi-band scenes with known region layout and classes:
# - Rectangular regions that tile the scene exactly
# - Per-region mean spectrum, texture (flat | checkerboard | speckle) and
#   Gaussian noise
# - Texture modulation is a per-pixel factor shared by all bands, so it
#   changes brightness but not the spectral angle
#
# Default acceptance scene (256x256, 4 bands: blue, green, red, nir):
#   8 rows of 8 blocks separated by full-width roads; blocks alternate
#   between vegetation and buildings, half the buildings damaged (speckled).
#
# Produces (under synthetic_data/):
#   scene.qras, truth.pgm, classes.csv
#
# Usage:
#   python data_synthesizer.py
#   (or import and call generate_scene(acceptance_scene_spec(seed=42)))

import logging
import os
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from file_processor.label_map_processor import save_label_map
from file_processor.raster_processor import MultiBandRaster, save_raster
from file_processor.table_processor import save_region_classes
from segmentation.label_map import LabelMap
from utils.config import read_toml
from utils.errors import SceneSpecError

logger = logging.getLogger(__name__)

INTACT, DAMAGED, VEGETATION, ROAD = 0, 1, 2, 3
CLASS_NAMES = {INTACT: "intact", DAMAGED: "damaged", VEGETATION: "vegetation", ROAD: "road"}

ROOF_SPECTRUM = [0.40, 0.30, 0.25, 0.35]
VEGETATION_SPECTRUM = [0.05, 0.12, 0.06, 0.55]
ROAD_SPECTRUM = [0.22, 0.24, 0.26, 0.28]

BASE_DIR = "synthetic_data"


class RegionSpec(BaseModel):
    row: int = Field(ge=0)
    col: int = Field(ge=0)
    height: int = Field(ge=1)
    width: int = Field(ge=1)
    spectrum: List[float]
    class_id: int = Field(ge=0)
    texture: Literal["flat", "checkerboard", "speckle"] = "flat"
    amplitude: float = Field(0.0, ge=0)
    noise_std: Optional[float] = Field(None, ge=0)


class SceneSpec(BaseModel):
    width: int = Field(ge=1)
    height: int = Field(ge=1)
    bands: int = Field(ge=1)
    seed: int = 42
    noise_std: float = Field(0.0, ge=0)
    regions: List[RegionSpec]

    def check_layout(self) -> None:
        """Spectra must be finite with one value per band; rectangles must tile the scene exactly."""
        if not self.regions:
            raise SceneSpecError("scene has no regions")
        cover = np.zeros((self.height, self.width), dtype=np.int64)
        for i, region in enumerate(self.regions):
            if len(region.spectrum) != self.bands:
                raise SceneSpecError(f"region {i}: spectrum has {len(region.spectrum)} values for {self.bands} bands")
            if not np.all(np.isfinite(region.spectrum)):
                raise SceneSpecError(f"region {i}: spectrum is not finite")
            if region.row + region.height > self.height or region.col + region.width > self.width:
                raise SceneSpecError(f"region {i} extends outside the {self.width}x{self.height} scene")
            cover[region.row:region.row + region.height, region.col:region.col + region.width] += 1
        if np.any(cover > 1):
            r, c = np.argwhere(cover > 1)[0]
            raise SceneSpecError(f"regions overlap at pixel ({r}, {c})")
        if np.any(cover == 0):
            r, c = np.argwhere(cover == 0)[0]
            raise SceneSpecError(f"pixel ({r}, {c}) is not covered by any region")


PRESET_KEYS = ("seed", "size", "block_rows", "blocks_per_row", "road_width", "noise_std", "speckle_amplitude")


def load_scene_spec(path) -> SceneSpec:
    """
    Scene spec from TOML. `preset = "acceptance"` selects the block-and-road
    layout; any of PRESET_KEYS next to it override its defaults.
    """
    raw = read_toml(path)
    preset = raw.pop("preset", None)
    if preset is not None:
        if preset != "acceptance":
            raise SceneSpecError(f"{path}: unknown preset '{preset}'")
        unknown = sorted(set(raw) - set(PRESET_KEYS))
        if unknown:
            raise SceneSpecError(f"{path}: unknown preset options {unknown}")
        return acceptance_scene_spec(**raw)
    try:
        return SceneSpec(**raw)
    except ValidationError as e:
        raise SceneSpecError(f"{path}: invalid scene spec:\n{e}") from e


def _texture_factor(region: RegionSpec, rng: np.random.Generator) -> np.ndarray:
    shape = (region.height, region.width)
    if region.texture == "checkerboard":
        rows, cols = np.indices(shape)
        return 1.0 + region.amplitude * np.where((rows + cols) % 2 == 0, 1.0, -1.0)
    if region.texture == "speckle":
        return 1.0 + region.amplitude * rng.uniform(-1.0, 1.0, size=shape)
    return np.ones(shape)


def generate_scene(spec: SceneSpec) -> Tuple[MultiBandRaster, LabelMap, np.ndarray]:
    """Raster, truth label map (region i = spec.regions[i]) and the class id of every region."""
    spec.check_layout()
    rng = np.random.default_rng(spec.seed)
    values = np.zeros((spec.bands, spec.height, spec.width))
    truth = np.zeros((spec.height, spec.width), dtype=np.int32)
    for i, region in enumerate(spec.regions):
        window = (slice(region.row, region.row + region.height), slice(region.col, region.col + region.width))
        factor = _texture_factor(region, rng)
        spectrum = np.asarray(region.spectrum, dtype=np.float64)
        values[(slice(None),) + window] = spectrum[:, None, None] * factor[None]
        noise_std = spec.noise_std if region.noise_std is None else region.noise_std
        if noise_std > 0:
            values[(slice(None),) + window] += rng.normal(0.0, noise_std, size=(spec.bands,) + factor.shape)
        truth[window] = i
    classes = np.array([r.class_id for r in spec.regions], dtype=np.int64)
    logger.info("generated %dx%dx%d scene with %d regions", spec.width, spec.height, spec.bands, len(spec.regions))
    return MultiBandRaster(values), LabelMap(truth), classes


def _block_cuts(width: int, blocks: int, jitter: int, rng: np.random.Generator) -> List[int]:
    step = width // blocks
    inner = [step * j + int(rng.integers(-jitter, jitter + 1)) for j in range(1, blocks)]
    return [0] + inner + [width]


def acceptance_scene_spec(
    seed: int = 42,
    size: int = 256,
    block_rows: int = 8,
    blocks_per_row: int = 8,
    road_width: int = 4,
    noise_std: float = 0.002,
    speckle_amplitude: float = 0.25,
) -> SceneSpec:
    """
    Rows of blocks separated by full-width roads. Within a row, buildings and
    vegetation alternate (offset by row parity) so no two buildings touch;
    half of all buildings are damaged.
    """
    rng = np.random.default_rng(seed)
    row_height = size // block_rows
    if row_height <= road_width or size % block_rows:
        raise SceneSpecError(f"cannot fit {block_rows} block rows with {road_width}px roads into {size}px")
    building_slots = [
        (r, j) for r in range(block_rows) for j in range(blocks_per_row) if (r + j) % 2 == 0
    ]
    damaged = set(rng.permutation(len(building_slots))[: len(building_slots) // 2].tolist())
    building_state: Dict[Tuple[int, int], int] = {
        slot: DAMAGED if k in damaged else INTACT for k, slot in enumerate(building_slots)
    }
    regions: List[RegionSpec] = []
    for r in range(block_rows):
        top = r * row_height
        regions.append(RegionSpec(row=top, col=0, height=road_width, width=size,
                                  spectrum=ROAD_SPECTRUM, class_id=ROAD))
        cuts = _block_cuts(size, blocks_per_row, 6, rng)
        for j in range(blocks_per_row):
            block = dict(row=top + road_width, col=cuts[j], height=row_height - road_width, width=cuts[j + 1] - cuts[j])
            state = building_state.get((r, j))
            if state is None:
                regions.append(RegionSpec(**block, spectrum=VEGETATION_SPECTRUM, class_id=VEGETATION))
            elif state == DAMAGED:
                regions.append(RegionSpec(**block, spectrum=ROOF_SPECTRUM, class_id=DAMAGED,
                                          texture="speckle", amplitude=speckle_amplitude))
            else:
                regions.append(RegionSpec(**block, spectrum=ROOF_SPECTRUM, class_id=INTACT))
    return SceneSpec(width=size, height=size, bands=len(ROOF_SPECTRUM), seed=seed,
                     noise_std=noise_std, regions=regions)


def write_scene(spec: SceneSpec, raster_path, truth_path, classes_path) -> None:
    raster, truth, classes = generate_scene(spec)
    save_raster(raster, raster_path)
    save_label_map(truth, truth_path)
    save_region_classes(classes, classes_path)


if __name__ == "__main__":
    os.makedirs(BASE_DIR, exist_ok=True)
    spec = acceptance_scene_spec(seed=42)
    write_scene(
        spec,
        os.path.join(BASE_DIR, "scene.qras"),
        os.path.join(BASE_DIR, "truth.pgm"),
        os.path.join(BASE_DIR, "classes.csv"),
    )
    counts = np.bincount([r.class_id for r in spec.regions], minlength=len(CLASS_NAMES))
    print(f"✅ Generated {len(spec.regions)}-region scene under: {BASE_DIR}")
    print({CLASS_NAMES[c]: int(n) for c, n in enumerate(counts)})
