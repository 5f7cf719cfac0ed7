import math

import numpy as np
import pytest

from conftest import numeric_gradient, relative_error
from model_training.dae import (
    DaeLayer,
    corrupt,
    dae_gradients,
    dae_loss,
    dae_objective,
    dae_train,
    mean_reconstruction_loss,
    sgd_step,
)
from utils.config import TrainConfig
from utils.errors import ArgumentError


def test_loss_closed_forms():
    assert dae_loss([0.5, 0.5], [0.5, 0.5]) == pytest.approx(2 * math.log(2), abs=1e-6)
    assert dae_loss([1.0, 0.0], [0.9, 0.1]) == pytest.approx(0.210721, abs=1e-6)


@pytest.mark.parametrize("gamma, n, zeros", [(0.3, 10, 3), (0.5, 7, 3), (0.25, 4, 1), (0.1, 5, 0)])
def test_corrupt_zeroes_exact_count(gamma, n, zeros):
    rng = np.random.default_rng(0)
    x = np.ones((20, n))
    out = corrupt(x, gamma, rng)
    assert np.all((out == 0).sum(axis=1) == zeros)
    assert np.all(out[out != 0] == 1)
    assert np.all(x == 1)


def test_zero_rate_is_identity_and_draws_nothing():
    rng = np.random.default_rng(5)
    before = rng.bit_generator.state
    x = np.linspace(0, 1, 6)
    np.testing.assert_array_equal(corrupt(x, 0.0, rng), x)
    assert rng.bit_generator.state == before


def test_corrupt_rejects_bad_rate():
    with pytest.raises(ArgumentError):
        corrupt(np.ones(4), 1.0, np.random.default_rng(0))


@pytest.mark.parametrize("seed", range(5))
def test_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    layer = DaeLayer.initialize(6, 4, rng)
    x = rng.uniform(size=(5, 6))
    x_corrupted = corrupt(x, 0.3, rng)
    _, grads = dae_gradients(layer, x, x_corrupted)
    for param, grad in zip(layer.parameters(), grads.parameters()):
        for _ in range(5):
            index = tuple(rng.integers(0, s) for s in param.shape)
            numeric = numeric_gradient(lambda: dae_objective(layer, x, x_corrupted), param, index)
            assert relative_error(grad[index], numeric) < 1e-4


def test_training_reduces_reconstruction_loss(rng):
    data = rng.uniform(size=(40, 6))
    layer = DaeLayer.initialize(6, 4, rng)
    initial_W = layer.W.copy()
    cfg = TrainConfig(pretrain_epochs=50, batch_size=8, learning_rate=0.1, seed=3)
    trained, trace = dae_train(layer, data, cfg)
    assert len(trace) == 50
    assert trace[-1] < trace[0]
    assert trained.is_finite()
    # trains a copy
    np.testing.assert_array_equal(layer.W, initial_W)
    assert not np.array_equal(trained.W, initial_W)


def test_zero_corruption_follows_the_plain_autoencoder(rng):
    data = rng.uniform(size=(30, 5))
    layer = DaeLayer.initialize(5, 3, rng)
    cfg = TrainConfig(pretrain_epochs=6, batch_size=7, learning_rate=0.2, corruption_rate=0.0, seed=11)
    trained, trace = dae_train(layer, data, cfg)

    plain = layer.copy()
    shuffle = np.random.default_rng(cfg.seed)
    expected = []
    for _ in range(cfg.pretrain_epochs):
        order = shuffle.permutation(len(data))
        for start in range(0, len(order), cfg.batch_size):
            batch = data[order[start:start + cfg.batch_size]]
            _, grads = dae_gradients(plain, batch, batch)
            sgd_step(plain.parameters(), grads.parameters(), cfg.learning_rate)
        expected.append(mean_reconstruction_loss(plain, data))
    for a, b in zip(trained.parameters(), plain.parameters()):
        np.testing.assert_array_equal(a, b)
    assert trace == expected


def test_training_checks_input_width(rng):
    layer = DaeLayer.initialize(6, 4, rng)
    with pytest.raises(ArgumentError):
        dae_train(layer, np.zeros((3, 5)), TrainConfig())


def test_inconsistent_shapes_rejected():
    with pytest.raises(ArgumentError):
        DaeLayer(np.zeros((4, 6)), np.zeros(4), np.zeros((4, 6)), np.zeros(6))
