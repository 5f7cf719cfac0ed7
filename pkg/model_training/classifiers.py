# model_training/classifiers.py
"""
scikit-learn estimators around the SDAE, MLP and ELM trainers, so the
evaluation harness can clone, re-parameterize and fit them per fold inside a
normalizer -> model pipeline.
"""
from typing import Dict, Optional, Type

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.pipeline import Pipeline
from sklearn.utils.validation import check_is_fitted

from feature_extraction.feature_matrix import FeatureNormalizer
from model_training.baselines import elm_train, mlp_train
from model_training.model_io import Model, load_model, save_model
from model_training.sdae import SdaeModel, sdae_train
from utils.config import TrainConfig
from utils.errors import ArgumentError


class _DamageClassifier(ClassifierMixin, BaseEstimator):
    def _fit_model(self, X: np.ndarray, y: np.ndarray) -> Model:
        raise NotImplementedError

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if X.ndim != 2 or len(X) != len(y):
            raise ArgumentError(f"X of shape {X.shape} does not match {len(y)} labels")
        self.model_ = self._fit_model(X, y)
        self.classes_ = self.model_.classes
        self.n_features_in_ = X.shape[1]
        return self

    def predict_proba(self, X):
        check_is_fitted(self, "model_")
        return self.model_.predict_proba(np.asarray(X, dtype=np.float64))

    def predict(self, X):
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    @classmethod
    def from_model(cls, model: Model) -> "_DamageClassifier":
        clf = cls()
        clf.model_ = model
        clf.classes_ = model.classes
        clf.n_features_in_ = model.input_width
        return clf


class SdaeClassifier(_DamageClassifier):
    def __init__(
        self,
        hidden_width: int = 50,
        n_layers: int = 5,
        pretrain_epochs: int = 50,
        finetune_epochs: int = 200,
        batch_size: int = 32,
        learning_rate: float = 0.001,
        corruption_rate: float = 0.3,
        random_state: int = 42,
    ):
        self.hidden_width = hidden_width
        self.n_layers = n_layers
        self.pretrain_epochs = pretrain_epochs
        self.finetune_epochs = finetune_epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.corruption_rate = corruption_rate
        self.random_state = random_state

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            pretrain_epochs=self.pretrain_epochs,
            finetune_epochs=self.finetune_epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            corruption_rate=self.corruption_rate,
            seed=self.random_state,
            n_layers=self.n_layers,
        )

    def _fit_model(self, X, y):
        return sdae_train(X, self.hidden_width, self.train_config(), y=y)


class MlpClassifier(_DamageClassifier):
    def __init__(
        self,
        hidden_width: int = 50,
        finetune_epochs: int = 200,
        batch_size: int = 32,
        learning_rate: float = 0.001,
        random_state: int = 42,
    ):
        self.hidden_width = hidden_width
        self.finetune_epochs = finetune_epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.random_state = random_state

    def train_config(self) -> TrainConfig:
        return TrainConfig(
            pretrain_epochs=0,
            finetune_epochs=self.finetune_epochs,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            seed=self.random_state,
            n_layers=1,
        )

    def _fit_model(self, X, y):
        return mlp_train(X, self.hidden_width, self.train_config(), y=y)


class ElmClassifier(_DamageClassifier):
    def __init__(self, hidden_width: int = 50, ridge: float = 1e-6, random_state: int = 42):
        self.hidden_width = hidden_width
        self.ridge = ridge
        self.random_state = random_state

    def _fit_model(self, X, y):
        return elm_train(X, self.hidden_width, self.random_state, self.ridge, y=y)


CLASSIFIERS: Dict[str, Type[_DamageClassifier]] = {
    "sdae": SdaeClassifier,
    "mlp": MlpClassifier,
    "elm": ElmClassifier,
}


def make_estimator(family: str, cfg: Optional[TrainConfig] = None, **params) -> _DamageClassifier:
    """Estimator of one model family with hyperparameters taken from `cfg`, then `params`."""
    if family not in CLASSIFIERS:
        raise ArgumentError(f"unknown model family '{family}' (expected one of {sorted(CLASSIFIERS)})")
    cfg = cfg or TrainConfig()
    estimator = CLASSIFIERS[family]()
    defaults = {
        "n_layers": cfg.n_layers,
        "pretrain_epochs": cfg.pretrain_epochs,
        "finetune_epochs": cfg.finetune_epochs,
        "batch_size": cfg.batch_size,
        "learning_rate": cfg.learning_rate,
        "corruption_rate": cfg.corruption_rate,
        "ridge": cfg.ridge,
        "random_state": cfg.seed,
    }
    accepted = estimator.get_params()
    estimator.set_params(**{k: v for k, v in defaults.items() if k in accepted})
    unknown = set(params) - set(accepted)
    if unknown:
        raise ArgumentError(f"{family} has no parameters {sorted(unknown)}")
    return estimator.set_params(**params)


def make_classifier(family: str, cfg: Optional[TrainConfig] = None, **params) -> Pipeline:
    """Normalizer fit on the training rows followed by the model."""
    return Pipeline([
        ("normalize", FeatureNormalizer()),
        ("model", make_estimator(family, cfg, **params)),
    ])


def save_classifier(pipeline: Pipeline, path) -> None:
    normalize = pipeline.named_steps["normalize"]
    model = pipeline.named_steps["model"]
    check_is_fitted(model, "model_")
    save_model(model.model_, path, None if isinstance(normalize, str) else normalize)


def load_classifier(path) -> Pipeline:
    """Fitted pipeline rebuilt from a model file; files without SCALE skip normalization."""
    model, normalizer = load_model(path)
    cls = SdaeClassifier if isinstance(model, SdaeModel) else ElmClassifier
    if isinstance(model, SdaeModel) and model.n_layers == 1:
        cls = MlpClassifier
    return Pipeline([
        ("normalize", normalizer if normalizer is not None else "passthrough"),
        ("model", cls.from_model(model)),
    ])
