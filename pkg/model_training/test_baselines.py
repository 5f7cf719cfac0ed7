import numpy as np
import pytest

from conftest import numeric_gradient, relative_error
from model_training.baselines import elm_predict, elm_train, mlp_train, ridge_output_weights
from model_training.sdae import finetune_gradients, finetune_objective
from utils.config import TrainConfig
from utils.errors import NumericalError


def _data(rng, n=40):
    x = rng.uniform(size=(n, 3))
    y = (x[:, 0] + x[:, 1] > 1.0).astype(int)
    return x, y


def test_mlp_is_one_hidden_layer(rng):
    x, y = _data(rng)
    model = mlp_train(x, 6, TrainConfig(finetune_epochs=2, n_layers=5), y=y)
    assert model.n_layers == 1
    assert model.hidden[0].W.shape == (6, 3)


@pytest.mark.parametrize("seed", range(5))
def test_mlp_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    x = rng.uniform(size=(8, 3))
    y = np.array([0, 1] * 4)
    model = mlp_train(x, 4, TrainConfig(finetune_epochs=1, seed=seed), y=y)
    _, grads = finetune_gradients(model, x, y)
    params = model.parameters()
    for _ in range(20):
        k = int(rng.integers(len(params)))
        index = tuple(rng.integers(0, s) for s in params[k].shape)
        numeric = numeric_gradient(lambda: finetune_objective(model, x, y), params[k], index)
        assert relative_error(grads[k][index], numeric) < 1e-4


def test_elm_output_weights_are_least_squares(rng):
    x, y = _data(rng)
    model = elm_train(x, 5, seed=3, ridge=0.0, y=y)
    hidden = model.hidden_output(x)
    targets = np.eye(2)[y]
    expected, *_ = np.linalg.lstsq(hidden, targets, rcond=None)
    # compare fitted values, which stay well conditioned
    np.testing.assert_allclose(hidden @ model.output_weights, hidden @ expected, atol=1e-7)


def test_elm_ridge_solution(rng):
    x, y = _data(rng)
    model = elm_train(x, 8, seed=1, ridge=0.5, y=y)
    hidden = model.hidden_output(x)
    expected = np.linalg.solve(hidden.T @ hidden + 0.5 * np.eye(8), hidden.T @ np.eye(2)[y])
    np.testing.assert_allclose(model.output_weights, expected, rtol=1e-7, atol=1e-9)


def test_elm_weights_drawn_from_seed(rng):
    x, y = _data(rng)
    a, b = elm_train(x, 10, seed=4, y=y), elm_train(x, 10, seed=4, y=y)
    np.testing.assert_array_equal(a.input_weights, b.input_weights)
    assert np.all(np.abs(a.input_weights) <= 1) and np.all(np.abs(a.hidden_bias) <= 1)


def test_elm_without_ridge_needs_full_rank(rng):
    x, y = _data(rng, n=6)
    with pytest.raises(NumericalError):
        elm_train(x, 20, seed=0, ridge=0.0, y=y)


def test_ridge_makes_underdetermined_systems_solvable():
    hidden = np.ones((2, 3))
    beta = ridge_output_weights(hidden, np.eye(2), ridge=1e-3)
    assert np.all(np.isfinite(beta))


def test_elm_predicts_training_labels(rng):
    x, y = _data(rng, n=60)
    model = elm_train(x, 30, seed=0, y=y)
    proba, labels = elm_predict(model, x)
    np.testing.assert_allclose(proba.sum(axis=1), 1.0)
    assert np.mean(labels == y) >= 0.9
