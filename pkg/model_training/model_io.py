# model_training/model_io.py
"""
Versioned text model files.

SDAE1 (SDAE and MLP):
    SDAE1 <n_layers> <n_classes> <input_width>
    CLASSES <c0> <c1> ...
    LAYER <in> <out>            one block per hidden layer, logistic layer last
    <out lines of <in> weights>
    <one line of <out> biases>
    SCALE <width>               optional min-max normalization bounds
    <min line>
    <max line>

ELM1:
    ELM1 <hidden> <n_classes> <input_width>
    CLASSES <c0> <c1> ...
    <hidden lines of input weights>, <hidden bias line>,
    <hidden lines of output weights>, then the optional SCALE block.

Floats are written with repr() so a reload reproduces them exactly.
"""
import logging
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from feature_extraction.feature_matrix import FeatureNormalizer
from model_training.baselines import ElmModel
from model_training.dae import DenseLayer
from model_training.sdae import SdaeModel
from utils.errors import DataError, RasterWriteError

logger = logging.getLogger(__name__)

SDAE_MAGIC = "SDAE1"
ELM_MAGIC = "ELM1"

Model = Union[SdaeModel, ElmModel]


def _row(values) -> str:
    return " ".join(repr(float(v)) for v in np.ravel(values))


def _matrix_lines(matrix: np.ndarray) -> List[str]:
    return [_row(r) for r in np.atleast_2d(matrix)]


def _scale_lines(normalizer: Optional[FeatureNormalizer]) -> List[str]:
    if normalizer is None:
        return []
    return [f"SCALE {len(normalizer.data_min_)}", _row(normalizer.data_min_), _row(normalizer.data_max_)]


def format_sdae(model: SdaeModel, normalizer: Optional[FeatureNormalizer] = None) -> str:
    lines = [
        f"{SDAE_MAGIC} {model.n_layers} {model.n_classes} {model.input_width}",
        "CLASSES " + " ".join(str(int(c)) for c in model.classes),
    ]
    for layer in model.layers():
        lines.append(f"LAYER {layer.n_in} {layer.n_out}")
        lines.extend(_matrix_lines(layer.W))
        lines.append(_row(layer.b))
    lines.extend(_scale_lines(normalizer))
    return "\n".join(lines) + "\n"


def format_elm(model: ElmModel, normalizer: Optional[FeatureNormalizer] = None) -> str:
    lines = [
        f"{ELM_MAGIC} {model.hidden_width} {model.n_classes} {model.input_width}",
        "CLASSES " + " ".join(str(int(c)) for c in model.classes),
    ]
    lines.extend(_matrix_lines(model.input_weights))
    lines.append(_row(model.hidden_bias))
    lines.extend(_matrix_lines(model.output_weights))
    lines.extend(_scale_lines(normalizer))
    return "\n".join(lines) + "\n"


def save_model(model: Model, path, normalizer: Optional[FeatureNormalizer] = None) -> None:
    text = format_sdae(model, normalizer) if isinstance(model, SdaeModel) else format_elm(model, normalizer)
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    except OSError as e:
        raise RasterWriteError(f"cannot write model to {path}: {e}") from e
    logger.debug("saved %s to %s", type(model).__name__, path)


class _Lines:
    def __init__(self, text: str, source):
        self._lines: Iterator[str] = iter(line for line in text.splitlines() if line.strip())
        self.source = source

    def next(self, what: str) -> str:
        try:
            return next(self._lines)
        except StopIteration:
            raise DataError(f"{self.source}: unexpected end of file reading {what}") from None

    def header(self, keyword: str, count: int) -> List[int]:
        parts = self.next(keyword).split()
        if parts[0] != keyword or len(parts) != count + 1:
            raise DataError(f"{self.source}: expected '{keyword}' with {count} fields, got {' '.join(parts)[:60]!r}")
        try:
            return [int(p) for p in parts[1:]]
        except ValueError as e:
            raise DataError(f"{self.source}: non-integer field in '{keyword}' line") from e

    def floats(self, width: int, what: str) -> np.ndarray:
        try:
            values = np.array([float(v) for v in self.next(what).split()])
        except ValueError as e:
            raise DataError(f"{self.source}: malformed number in {what}") from e
        if values.shape != (width,):
            raise DataError(f"{self.source}: {what} has {values.size} values, expected {width}")
        return values

    def matrix(self, rows: int, cols: int, what: str) -> np.ndarray:
        return np.stack([self.floats(cols, what) for _ in range(rows)]) if rows else np.zeros((0, cols))

    def classes(self, n_classes: int) -> np.ndarray:
        parts = self.next("CLASSES").split()
        if parts[0] != "CLASSES" or len(parts) != n_classes + 1:
            raise DataError(f"{self.source}: expected CLASSES line with {n_classes} labels")
        return np.array([int(p) for p in parts[1:]], dtype=np.int64)

    def optional_scale(self, width: int) -> Optional[FeatureNormalizer]:
        try:
            line = next(self._lines)
        except StopIteration:
            return None
        parts = line.split()
        if parts[0] != "SCALE" or parts[1:] != [str(width)]:
            raise DataError(f"{self.source}: unexpected trailing line {line[:60]!r}")
        normalizer = FeatureNormalizer()
        normalizer.data_min_ = self.floats(width, "SCALE minimum")
        normalizer.data_max_ = self.floats(width, "SCALE maximum")
        return normalizer


def parse_model(text: str, source="<model>") -> Tuple[Model, Optional[FeatureNormalizer]]:
    lines = _Lines(text, source)
    first = text.split(maxsplit=1)[0] if text.strip() else ""
    if first == SDAE_MAGIC:
        n_layers, n_classes, input_width = lines.header(SDAE_MAGIC, 3)
        classes = lines.classes(n_classes)
        layers, n_in = [], input_width
        for i in range(n_layers + 1):
            layer_in, layer_out = lines.header("LAYER", 2)
            if layer_in != n_in:
                raise DataError(f"{source}: layer {i} takes {layer_in} inputs, previous layer gives {n_in}")
            W = lines.matrix(layer_out, layer_in, f"layer {i} weights")
            b = lines.floats(layer_out, f"layer {i} biases")
            layers.append(DenseLayer(W, b))
            n_in = layer_out
        model = SdaeModel(hidden=layers[:-1], top=layers[-1], classes=classes)
        return model, lines.optional_scale(input_width)
    if first == ELM_MAGIC:
        hidden, n_classes, input_width = lines.header(ELM_MAGIC, 3)
        classes = lines.classes(n_classes)
        input_weights = lines.matrix(hidden, input_width, "input weights")
        bias = lines.floats(hidden, "hidden bias")
        output_weights = lines.matrix(hidden, n_classes, "output weights")
        model = ElmModel(input_weights, bias, output_weights, classes)
        return model, lines.optional_scale(input_width)
    raise DataError(f"{source}: unknown model format {first[:16]!r}")


def load_model(path) -> Tuple[Model, Optional[FeatureNormalizer]]:
    try:
        with open(path, "r", encoding="ascii") as fh:
            text = fh.read()
    except FileNotFoundError as e:
        raise DataError(f"model file not found: {path}") from e
    return parse_model(text, path)
