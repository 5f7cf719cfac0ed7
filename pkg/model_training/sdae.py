# model_training/sdae.py
"""
Stacked denoising autoencoder classifier.

Hidden layers are pretrained one at a time as DAEs, each on the previous
layer's code mapped to [0, 1]; the decoders are then dropped, a softmax
layer is put on top and the whole encoder stack is fine-tuned by
backpropagation on the class cross-entropy.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp, softmax

from feature_extraction.feature_matrix import FeatureMatrix
from model_training.dae import DaeLayer, DenseLayer, dae_train, glorot_uniform, sgd_step, to_unit_interval
from utils.config import TrainConfig
from utils.errors import ArgumentError, DivergenceError

logger = logging.getLogger(__name__)

FeaturesLike = Union[FeatureMatrix, np.ndarray]


def training_streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    """Independent generators for initialization, pretraining and fine-tuning."""
    return tuple(np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3))


@dataclass
class SdaeModel:
    hidden: List[DenseLayer]
    top: DenseLayer
    classes: np.ndarray
    corruption_rate: float = 0.3
    learning_rate: float = 0.001
    seed: int = 42
    decoders: Optional[List[DaeLayer]] = field(default=None, repr=False)
    pretrain_losses: List[List[float]] = field(default_factory=list, repr=False)
    finetune_losses: List[float] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.classes = np.asarray(self.classes, dtype=np.int64)
        widths = [layer.n_in for layer in self.hidden] + [self.top.n_in]
        for i, layer in enumerate(self.hidden):
            if layer.n_out != widths[i + 1]:
                raise ArgumentError(f"layer {i} outputs {layer.n_out} values, next layer expects {widths[i + 1]}")
        if self.top.n_out != len(self.classes):
            raise ArgumentError(f"top layer has {self.top.n_out} outputs for {len(self.classes)} classes")
        if not 0.0 <= self.corruption_rate < 1.0:
            raise ArgumentError(f"corruption rate must lie in [0, 1), got {self.corruption_rate}")

    @classmethod
    def build(
        cls,
        input_width: int,
        hidden_widths: Sequence[int],
        classes: Sequence[int],
        cfg: TrainConfig,
    ) -> "SdaeModel":
        """Fresh model: DAE layers with Glorot-uniform weights, zero biases and a logistic top layer."""
        classes = np.asarray(classes, dtype=np.int64)
        if len(classes) < 2:
            raise ArgumentError(f"need at least 2 classes, got {len(classes)}")
        init_rng, _, _ = training_streams(cfg.seed)
        decoders, n_in = [], input_width
        for width in hidden_widths:
            decoders.append(DaeLayer.initialize(n_in, width, init_rng))
            n_in = width
        top = DenseLayer(glorot_uniform(len(classes), n_in, init_rng), np.zeros(len(classes)))
        return cls(
            hidden=[d.encoder() for d in decoders],
            top=top,
            classes=classes,
            corruption_rate=cfg.corruption_rate,
            learning_rate=cfg.learning_rate,
            seed=cfg.seed,
            decoders=decoders,
        )

    @property
    def input_width(self) -> int:
        return self.hidden[0].n_in if self.hidden else self.top.n_in

    @property
    def n_layers(self) -> int:
        return len(self.hidden)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def layers(self) -> List[DenseLayer]:
        return self.hidden + [self.top]

    def parameters(self) -> List[np.ndarray]:
        return [p for layer in self.layers() for p in layer.parameters()]

    def copy(self) -> "SdaeModel":
        return SdaeModel(
            hidden=[layer.copy() for layer in self.hidden],
            top=self.top.copy(),
            classes=self.classes.copy(),
            corruption_rate=self.corruption_rate,
            learning_rate=self.learning_rate,
            seed=self.seed,
            decoders=None if self.decoders is None else [d.copy() for d in self.decoders],
            pretrain_losses=[list(t) for t in self.pretrain_losses],
            finetune_losses=list(self.finetune_losses),
        )

    def representations(self, x: np.ndarray) -> List[np.ndarray]:
        """Input followed by every layer's [0, 1] code."""
        reps = [x]
        for layer in self.hidden:
            reps.append(to_unit_interval(np.tanh(layer.affine(reps[-1]))))
        return reps

    def logits(self, x: np.ndarray) -> np.ndarray:
        return self.top.affine(self.representations(x)[-1])

    def predict_proba(self, x: np.ndarray) -> np.ndarray:
        return softmax(self.logits(self._check_width(x)), axis=1)

    def _check_width(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.input_width:
            raise ArgumentError(f"model expects {self.input_width} features, got {x.shape[1]}")
        return x

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.parameters())


def as_training_data(features: FeaturesLike, y: Optional[np.ndarray] = None) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Normalized matrix and class labels from a FeatureMatrix, or arrays passed through."""
    if isinstance(features, FeatureMatrix):
        return features.normalized(), (features.classes if y is None else np.asarray(y))
    return np.asarray(features, dtype=np.float64), (None if y is None else np.asarray(y))


def class_indices(classes: np.ndarray, y: np.ndarray) -> np.ndarray:
    index = np.searchsorted(classes, y)
    index = np.clip(index, 0, len(classes) - 1)
    if not np.array_equal(classes[index], y):
        raise ArgumentError(f"labels {sorted(set(np.asarray(y).tolist()) - set(classes.tolist()))} are not model classes")
    return index


def finetune_objective(model: SdaeModel, x: np.ndarray, targets: np.ndarray) -> float:
    """Mean softmax cross-entropy; `targets` are class indices."""
    logits = model.logits(x)
    return float(np.mean(logsumexp(logits, axis=1) - logits[np.arange(len(targets)), targets]))


def finetune_gradients(model: SdaeModel, x: np.ndarray, targets: np.ndarray) -> Tuple[float, List[np.ndarray]]:
    """Objective and gradients in `model.parameters()` order."""
    m = x.shape[0]
    reps = model.representations(x)
    logits = model.top.affine(reps[-1])
    loss = float(np.mean(logsumexp(logits, axis=1) - logits[np.arange(m), targets]))

    delta = softmax(logits, axis=1)
    delta[np.arange(m), targets] -= 1.0
    delta /= m
    grads = [delta.T @ reps[-1], delta.sum(axis=0)]
    upstream = delta @ model.top.W
    for i in range(model.n_layers - 1, -1, -1):
        code = reps[i + 1]
        # d(code)/d(preactivation) for code = (tanh + 1) / 2
        d_pre = upstream * 2.0 * code * (1.0 - code)
        grads = [d_pre.T @ reps[i], d_pre.sum(axis=0)] + grads
        upstream = d_pre @ model.hidden[i].W
    return loss, grads


def pretrain_stack(model: SdaeModel, data: FeaturesLike, cfg: TrainConfig) -> SdaeModel:
    """Greedy layer-wise DAE pretraining; loss traces land in `pretrain_losses`."""
    x, _ = as_training_data(data)
    x = model._check_width(x)
    if np.any(x < 0) or np.any(x > 1):
        raise ArgumentError("pretraining data must lie in [0, 1]")
    model = model.copy()
    if model.decoders is None:
        raise ArgumentError("model has no decoders left to pretrain")
    _, pretrain_rng, _ = training_streams(cfg.seed)
    model.pretrain_losses = []
    codes = x
    for i, dae in enumerate(model.decoders):
        trained, trace = dae_train(dae, codes, cfg, pretrain_rng)
        model.decoders[i] = trained
        model.hidden[i] = trained.encoder()
        model.pretrain_losses.append(trace)
        if trace:
            logger.info("pretrained layer %d (%d->%d): loss %.5f -> %.5f",
                        i + 1, trained.n_in, trained.n_hidden, trace[0], trace[-1])
        codes = trained.represent(codes)
    return model


def fine_tune(model: SdaeModel, data: FeaturesLike, cfg: TrainConfig, y: Optional[np.ndarray] = None) -> SdaeModel:
    """Supervised backpropagation through the encoder stack and the logistic layer; decoders are dropped."""
    x, labels = as_training_data(data, y)
    if labels is None:
        raise ArgumentError("fine-tuning needs class labels")
    x = model._check_width(x)
    targets = class_indices(model.classes, np.asarray(labels, dtype=np.int64))
    model = model.copy()
    model.decoders = None
    _, _, finetune_rng = training_streams(cfg.seed)
    model.finetune_losses = []
    for epoch in range(1, cfg.finetune_epochs + 1):
        order = finetune_rng.permutation(x.shape[0])
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            _, grads = finetune_gradients(model, x[batch], targets[batch])
            sgd_step(model.parameters(), grads, cfg.learning_rate)
        loss = finetune_objective(model, x, targets)
        if not math.isfinite(loss) or not model.is_finite():
            raise DivergenceError(epoch, loss, "fine-tuning")
        model.finetune_losses.append(loss)
        logger.debug("fine-tune epoch %d loss %.6f", epoch, loss)
    if model.finetune_losses:
        logger.info("fine-tuned %d-layer model: loss %.5f -> %.5f",
                    model.n_layers, model.finetune_losses[0], model.finetune_losses[-1])
    return model


def predict(model: SdaeModel, features: FeaturesLike) -> Tuple[np.ndarray, np.ndarray]:
    """Per-row class probabilities and the argmax class labels."""
    x, _ = as_training_data(features)
    proba = model.predict_proba(x)
    return proba, model.classes[np.argmax(proba, axis=1)]


def sdae_train(
    features: FeaturesLike,
    hidden_width: int,
    cfg: TrainConfig,
    y: Optional[np.ndarray] = None,
    classes: Optional[Sequence[int]] = None,
) -> SdaeModel:
    """Build a cfg.n_layers stack of uniform width, pretrain it, then fine-tune."""
    x, labels = as_training_data(features, y)
    if labels is None:
        raise ArgumentError("training needs class labels")
    classes = np.unique(labels) if classes is None else np.asarray(classes)
    model = SdaeModel.build(x.shape[1], [hidden_width] * cfg.n_layers, classes, cfg)
    model = pretrain_stack(model, x, cfg)
    return fine_tune(model, x, cfg, labels)
