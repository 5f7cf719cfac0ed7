# model_training/dae.py
"""
Denoising autoencoder layer: tanh encoder, sigmoid decoder, untied weights,
trained by mini-batch SGD on the reconstruction cross-entropy of corrupted
inputs.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.special import expit

from utils.config import TrainConfig
from utils.errors import ArgumentError, DivergenceError

logger = logging.getLogger(__name__)


def glorot_uniform(n_out: int, n_in: int, rng: np.random.Generator) -> np.ndarray:
    bound = math.sqrt(6.0 / (n_in + n_out))
    return rng.uniform(-bound, bound, size=(n_out, n_in))


def to_unit_interval(hidden: np.ndarray) -> np.ndarray:
    """tanh output mapped from [-1, 1] onto [0, 1]."""
    return (hidden + 1.0) / 2.0


@dataclass
class DenseLayer:
    """Affine map `x @ W.T + b`; W is (n_out, n_in)."""

    W: np.ndarray
    b: np.ndarray

    @property
    def n_in(self) -> int:
        return self.W.shape[1]

    @property
    def n_out(self) -> int:
        return self.W.shape[0]

    def affine(self, x: np.ndarray) -> np.ndarray:
        return x @ self.W.T + self.b

    def parameters(self) -> List[np.ndarray]:
        return [self.W, self.b]

    def copy(self) -> "DenseLayer":
        return DenseLayer(self.W.copy(), self.b.copy())


@dataclass
class DaeLayer:
    W: np.ndarray
    b: np.ndarray
    W_dec: np.ndarray
    b_dec: np.ndarray

    def __post_init__(self):
        n_hidden, n_in = self.W.shape
        if self.b.shape != (n_hidden,) or self.W_dec.shape != (n_in, n_hidden) or self.b_dec.shape != (n_in,):
            raise ArgumentError(
                f"inconsistent DAE shapes: W {self.W.shape}, b {self.b.shape}, "
                f"W_dec {self.W_dec.shape}, b_dec {self.b_dec.shape}"
            )

    @classmethod
    def initialize(cls, n_in: int, n_hidden: int, rng: np.random.Generator) -> "DaeLayer":
        if n_in < 1 or n_hidden < 1:
            raise ArgumentError(f"layer widths must be >= 1, got {n_in} -> {n_hidden}")
        return cls(
            W=glorot_uniform(n_hidden, n_in, rng),
            b=np.zeros(n_hidden),
            W_dec=glorot_uniform(n_in, n_hidden, rng),
            b_dec=np.zeros(n_in),
        )

    @property
    def n_in(self) -> int:
        return self.W.shape[1]

    @property
    def n_hidden(self) -> int:
        return self.W.shape[0]

    def encode(self, x: np.ndarray) -> np.ndarray:
        return np.tanh(x @ self.W.T + self.b)

    def decode_logits(self, y: np.ndarray) -> np.ndarray:
        return y @ self.W_dec.T + self.b_dec

    def reconstruct(self, x: np.ndarray) -> np.ndarray:
        return expit(self.decode_logits(self.encode(x)))

    def represent(self, x: np.ndarray) -> np.ndarray:
        """Hidden code in [0, 1], the input of the next layer."""
        return to_unit_interval(self.encode(x))

    def encoder(self) -> DenseLayer:
        return DenseLayer(self.W.copy(), self.b.copy())

    def parameters(self) -> List[np.ndarray]:
        return [self.W, self.b, self.W_dec, self.b_dec]

    def copy(self) -> "DaeLayer":
        return DaeLayer(*(p.copy() for p in self.parameters()))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.parameters())


def corrupt(x: np.ndarray, gamma: float, rng: np.random.Generator) -> np.ndarray:
    """
    Zero exactly floor(gamma * n) distinct coordinates of every row, chosen
    uniformly with `rng`. Accepts a vector or a matrix of rows.
    """
    if not 0.0 <= gamma < 1.0:
        raise ArgumentError(f"corruption rate must lie in [0, 1), got {gamma}")
    x = np.asarray(x, dtype=np.float64)
    rows = np.atleast_2d(x)
    n = rows.shape[1]
    k = int(math.floor(gamma * n))
    out = rows.copy()
    if k > 0:
        drop = np.argsort(rng.random(rows.shape), axis=1, kind="stable")[:, :k]
        np.put_along_axis(out, drop, 0.0, axis=1)
    return out.reshape(x.shape)


def dae_loss(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Reconstruction cross-entropy summed over the last axis."""
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    return -np.sum(x * np.log(z) + (1.0 - x) * np.log1p(-z), axis=-1)


def _loss_from_logits(x: np.ndarray, logits: np.ndarray) -> np.ndarray:
    # -[x log s(a) + (1 - x) log(1 - s(a))] = softplus(a) - x * a
    return np.sum(np.logaddexp(0.0, logits) - x * logits, axis=-1)


def dae_objective(layer: DaeLayer, x: np.ndarray, x_corrupted: np.ndarray) -> float:
    """Mean reconstruction loss of clean rows `x` from their corrupted copies."""
    logits = layer.decode_logits(layer.encode(x_corrupted))
    return float(np.mean(_loss_from_logits(x, logits)))


def dae_gradients(layer: DaeLayer, x: np.ndarray, x_corrupted: np.ndarray) -> Tuple[float, DaeLayer]:
    """Objective value and its exact gradient, packed in a DaeLayer of the same shapes."""
    m = x.shape[0]
    hidden = layer.encode(x_corrupted)
    logits = layer.decode_logits(hidden)
    loss = float(np.mean(_loss_from_logits(x, logits)))

    d_logits = (expit(logits) - x) / m
    d_hidden = (d_logits @ layer.W_dec) * (1.0 - hidden ** 2)
    grads = DaeLayer(
        W=d_hidden.T @ x_corrupted,
        b=d_hidden.sum(axis=0),
        W_dec=d_logits.T @ hidden,
        b_dec=d_logits.sum(axis=0),
    )
    return loss, grads


def sgd_step(params: List[np.ndarray], grads: List[np.ndarray], learning_rate: float) -> None:
    for p, g in zip(params, grads):
        p -= learning_rate * g


def mean_reconstruction_loss(layer: DaeLayer, data: np.ndarray) -> float:
    return float(np.mean(_loss_from_logits(data, layer.decode_logits(layer.encode(data)))))


def dae_train(
    layer: DaeLayer,
    data: np.ndarray,
    cfg: TrainConfig,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[DaeLayer, List[float]]:
    """
    Train a copy of `layer` for cfg.pretrain_epochs epochs.

    Each epoch shuffles the rows with `rng`, then for every mini-batch
    corrupts it and takes one SGD step. Returns the trained layer and the
    per-epoch mean reconstruction loss on the uncorrupted data.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] != layer.n_in:
        raise ArgumentError(f"data of shape {data.shape} does not fit a layer with {layer.n_in} inputs")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    layer = layer.copy()
    trace: List[float] = []
    for epoch in range(1, cfg.pretrain_epochs + 1):
        order = rng.permutation(data.shape[0])
        for start in range(0, len(order), cfg.batch_size):
            batch = data[order[start:start + cfg.batch_size]]
            noisy = corrupt(batch, cfg.corruption_rate, rng)
            _, grads = dae_gradients(layer, batch, noisy)
            sgd_step(layer.parameters(), grads.parameters(), cfg.learning_rate)
        loss = mean_reconstruction_loss(layer, data)
        if not math.isfinite(loss) or not layer.is_finite():
            raise DivergenceError(epoch, loss, "DAE pretraining")
        trace.append(loss)
        logger.debug("DAE %d->%d epoch %d loss %.6f", layer.n_in, layer.n_hidden, epoch, loss)
    return layer, trace
