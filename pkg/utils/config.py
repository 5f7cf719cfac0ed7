# utils/config.py
"""
Pydantic configuration models shared by the library, the pipeline graph
and the CLI. Files are TOML (`key = value` lines grouped in `[sections]`).
"""
import logging
import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from utils.errors import ConfigError

logger = logging.getLogger(__name__)

WIDTH_GRID = [20, 50, 200, 800]
MODEL_FAMILIES = ("sdae", "mlp", "elm")


class SegmentationConfig(BaseModel):
    init_threshold: float = Field(0.08, gt=0)
    min_size: int = Field(16, ge=1)


class HeterogeneityWeights(BaseModel):
    w_spec: float = Field(0.7, ge=0, le=1)
    w_texture: float = Field(0.2, ge=0, le=1)
    w_shape: float = Field(0.1, ge=0, le=1)
    w_compact: float = Field(0.5, ge=0, le=1)
    w_smooth: float = Field(0.5, ge=0, le=1)

    @model_validator(mode="after")
    def _weights_sum_to_one(self):
        if abs(self.w_spec + self.w_texture + self.w_shape - 1.0) > 1e-9:
            raise ValueError("w_spec + w_texture + w_shape must equal 1")
        if abs(self.w_compact + self.w_smooth - 1.0) > 1e-9:
            raise ValueError("w_compact + w_smooth must equal 1")
        return self


class MergeConfig(BaseModel):
    scale: float = Field(20.0, ge=0)
    weights: HeterogeneityWeights = Field(default_factory=HeterogeneityWeights)


class FeatureConfig(BaseModel):
    # band order of the 4-band synthetic scenes: blue, green, red, nir
    nir_index: int = Field(3, ge=0)
    red_index: int = Field(2, ge=0)
    glcm_levels: int = Field(32, ge=2)


class TrainConfig(BaseModel):
    pretrain_epochs: int = Field(50, ge=0)
    finetune_epochs: int = Field(200, ge=0)
    batch_size: int = Field(32, ge=1)
    learning_rate: float = Field(0.001, gt=0)
    corruption_rate: float = Field(0.3, ge=0, lt=1)
    seed: int = 42
    n_layers: int = Field(5, ge=1)
    ridge: float = Field(1e-6, ge=0)


class EvaluationConfig(BaseModel):
    models: List[str] = Field(default_factory=lambda: list(MODEL_FAMILIES))
    grid: Dict[str, Dict[str, List[Any]]] = Field(
        default_factory=lambda: {m: {"hidden_width": list(WIDTH_GRID)} for m in MODEL_FAMILIES}
    )
    k: int = Field(5, ge=2)
    seed: int = 42
    positive_class: int = 1
    intact_class: Optional[int] = 0
    n_jobs: int = Field(default_factory=lambda: int(os.environ.get("QUAKESEG_N_JOBS", "1")))

    @field_validator("models")
    @classmethod
    def _known_models(cls, value: List[str]) -> List[str]:
        unknown = [m for m in value if m not in MODEL_FAMILIES]
        if unknown:
            raise ValueError(f"unknown model families: {unknown}")
        if not value:
            raise ValueError("at least one model family is required")
        return value

    @field_validator("grid")
    @classmethod
    def _non_empty_candidates(cls, value: Dict[str, Dict[str, List[Any]]]):
        for family, params in value.items():
            for name, candidates in params.items():
                if not candidates:
                    raise ValueError(f"grid {family}.{name} has no candidates")
        return value


class PipelineConfig(BaseModel):
    input_raster: Optional[Path] = None
    synth_spec: Optional[Path] = None
    truth_labels: Optional[Path] = None
    truth_classes: Optional[Path] = None
    output_dir: Path = Path("quakeseg_output")
    seed: int = 42
    overlay_model: str = "sdae"
    segmentation: SegmentationConfig = Field(default_factory=SegmentationConfig)
    merging: MergeConfig = Field(default_factory=MergeConfig)
    features: FeatureConfig = Field(default_factory=FeatureConfig)
    training: TrainConfig = Field(default_factory=TrainConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)

    @model_validator(mode="after")
    def _one_input(self):
        if (self.input_raster is None) == (self.synth_spec is None):
            raise ValueError("exactly one of input_raster or synth_spec is required")
        if self.input_raster is not None and self.truth_labels is not None and self.truth_classes is None:
            raise ValueError("truth_labels requires truth_classes")
        return self

    def with_seed(self, seed: int) -> "PipelineConfig":
        """Return a copy whose training and evaluation seeds follow `seed`."""
        return self.model_copy(update={
            "seed": seed,
            "training": self.training.model_copy(update={"seed": seed}),
            "evaluation": self.evaluation.model_copy(update={"seed": seed}),
        })

    def check_paths(self) -> None:
        for name in ("input_raster", "synth_spec", "truth_labels", "truth_classes"):
            path = getattr(self, name)
            if path is not None and not Path(path).is_file():
                raise ConfigError(f"{name}: file not found: {path}")


def read_toml(path) -> Dict[str, Any]:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e


def load_pipeline_config(path, seed: Optional[int] = None) -> PipelineConfig:
    """Load and validate a pipeline config; relative paths resolve against the file."""
    raw = read_toml(path)
    base = Path(path).resolve().parent
    for key in ("input_raster", "synth_spec", "truth_labels", "truth_classes", "output_dir"):
        if key in raw and not Path(raw[key]).is_absolute():
            raw[key] = str(base / raw[key])
    try:
        config = PipelineConfig(**raw)
    except ValidationError as e:
        raise ConfigError(f"{path}: invalid pipeline config:\n{e}") from e
    if seed is not None:
        config = config.with_seed(seed)
    elif "seed" in raw:
        config = config.with_seed(config.seed)
    logger.debug("loaded pipeline config from %s", path)
    return config
