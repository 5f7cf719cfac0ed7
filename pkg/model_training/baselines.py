# model_training/baselines.py
"""Baseline classifiers: one-hidden-layer MLP and the extreme learning machine."""
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.special import softmax

from model_training.sdae import FeaturesLike, SdaeModel, as_training_data, class_indices, fine_tune
from utils.config import TrainConfig
from utils.errors import ArgumentError, NumericalError

logger = logging.getLogger(__name__)


def mlp_train(
    features: FeaturesLike,
    hidden_width: int,
    cfg: TrainConfig,
    y: Optional[np.ndarray] = None,
    classes: Optional[Sequence[int]] = None,
) -> SdaeModel:
    """Single tanh hidden layer plus softmax, trained by backpropagation only."""
    x, labels = as_training_data(features, y)
    if labels is None:
        raise ArgumentError("training needs class labels")
    classes = np.unique(labels) if classes is None else np.asarray(classes)
    model = SdaeModel.build(x.shape[1], [hidden_width], classes, cfg)
    return fine_tune(model, x, cfg, labels)


@dataclass
class ElmModel:
    input_weights: np.ndarray  # (hidden, input_width)
    hidden_bias: np.ndarray  # (hidden,)
    output_weights: np.ndarray  # (hidden, n_classes)
    classes: np.ndarray

    def __post_init__(self):
        self.classes = np.asarray(self.classes, dtype=np.int64)
        hidden = self.input_weights.shape[0]
        if self.hidden_bias.shape != (hidden,) or self.output_weights.shape != (hidden, len(self.classes)):
            raise ArgumentError(
                f"inconsistent ELM shapes: input {self.input_weights.shape}, "
                f"bias {self.hidden_bias.shape}, output {self.output_weights.shape}"
            )

    @property
    def hidden_width(self) -> int:
        return self.input_weights.shape[0]

    @property
    def input_width(self) -> int:
        return self.input_weights.shape[1]

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def hidden_output(self, x: np.ndarray) -> np.ndarray:
        return np.tanh(x @ self.input_weights.T + self.hidden_bias)

    def scores(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.input_width:
            raise ArgumentError(f"model expects {self.input_width} features, got {x.shape[1]}")
        return self.hidden_output(x) @ self.output_weights

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        """Softmax of the least-squares output scores."""
        return softmax(self.scores(x), axis=1)

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.classes[np.argmax(self.scores(x), axis=1)]


def ridge_output_weights(hidden: np.ndarray, targets: np.ndarray, ridge: float) -> np.ndarray:
    """Solve (H^T H + ridge I) beta = H^T T."""
    gram = hidden.T @ hidden
    if ridge > 0:
        gram[np.diag_indices_from(gram)] += ridge
    elif np.linalg.matrix_rank(gram) < gram.shape[0]:
        raise NumericalError(
            f"singular ELM normal matrix ({hidden.shape[1]} hidden units, {hidden.shape[0]} samples) with ridge=0"
        )
    try:
        return linalg.solve(gram, hidden.T @ targets, assume_a="pos")
    except linalg.LinAlgError as e:
        raise NumericalError(f"ELM normal equations could not be solved: {e}") from e


def elm_train(
    features: FeaturesLike,
    hidden_width: int,
    seed: int,
    ridge: float = 1e-6,
    y: Optional[np.ndarray] = None,
    classes: Optional[Sequence[int]] = None,
) -> ElmModel:
    """Random tanh hidden layer; output weights by ridge least squares against one-hot targets."""
    if hidden_width < 1:
        raise ArgumentError(f"hidden_width must be >= 1, got {hidden_width}")
    if ridge < 0:
        raise ArgumentError(f"ridge must be >= 0, got {ridge}")
    x, labels = as_training_data(features, y)
    if labels is None:
        raise ArgumentError("training needs class labels")
    classes = np.unique(labels) if classes is None else np.asarray(classes, dtype=np.int64)
    targets = np.eye(len(classes))[class_indices(classes, np.asarray(labels, dtype=np.int64))]
    rng = np.random.default_rng(seed)
    input_weights = rng.uniform(-1.0, 1.0, size=(hidden_width, x.shape[1]))
    hidden_bias = rng.uniform(-1.0, 1.0, size=hidden_width)
    hidden = np.tanh(x @ input_weights.T + hidden_bias)
    output_weights = ridge_output_weights(hidden, targets, ridge)
    logger.debug("ELM fit: %d samples, %d hidden units, ridge %g", x.shape[0], hidden_width, ridge)
    return ElmModel(input_weights, hidden_bias, output_weights, classes)


def elm_predict(model: ElmModel, features: FeaturesLike) -> Tuple[np.ndarray, np.ndarray]:
    x, _ = as_training_data(features)
    return model.predict_proba(x), model.predict(x)
