"""Scikit-learn style wrappers so the filters and the aggregation pipeline
compose with the wider ecosystem (get_params/set_params, fit/predict,
fit/transform)."""

from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .classify import FeatureVector, LinearModel, TrainConfig, train_logistic
from .corpus import Document, InformationFrame
from .features import EmbeddingProvider
from .sieve import RedundancyScorer, RelevanceScorer, SieveConfig, aggregate_corpus


def check_feature_matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2d feature matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    return X


def check_binary_targets(y, n: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (n,):
        raise ValueError(f"expected {n} targets, got shape {y.shape}")
    if not set(np.unique(y)) <= {0, 1}:
        raise ValueError("targets must be binary 0/1")
    return y.astype(int)


class SGDLogisticClassifier(BaseEstimator, ClassifierMixin):
    """Binary logistic regression trained by seeded from-scratch SGD."""

    def __init__(
        self,
        learning_rate: float = 0.1,
        epochs: int = 100,
        l2_penalty: float = 0.0,
        seed: int = 0,
        shuffle: bool = True,
        positive_weight: float = 1.0,
        decision_threshold: float = 0.5,
    ):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2_penalty = l2_penalty
        self.seed = seed
        self.shuffle = shuffle
        self.positive_weight = positive_weight
        self.decision_threshold = decision_threshold

    def fit(self, X, y):
        X = check_feature_matrix(X)
        y = check_binary_targets(y, X.shape[0])
        schema = f"array/dim{X.shape[1]}"
        examples = [
            (FeatureVector(values=row, schema_id=schema), int(label))
            for row, label in zip(X, y)
        ]
        config = TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            l2_penalty=self.l2_penalty,
            seed=self.seed,
            shuffle=self.shuffle,
            positive_weight=self.positive_weight,
        )
        model = train_logistic(examples, config)
        self.model_ = LinearModel(
            weights=model.weights,
            bias=model.bias,
            schema_id=schema,
            decision_threshold=self.decision_threshold,
        )
        self.coef_ = model.weights.reshape(1, -1)
        self.intercept_ = np.array([model.bias])
        self.classes_ = np.array([0, 1])
        return self

    def _check_fitted(self):
        if not hasattr(self, "model_"):
            raise NotFittedError("call fit before predicting")

    def decision_function(self, X) -> np.ndarray:
        self._check_fitted()
        X = check_feature_matrix(X)
        if X.shape[1] != self.coef_.shape[1]:
            raise ValueError(
                f"X has {X.shape[1]} features, model expects {self.coef_.shape[1]}"
            )
        return X @ self.coef_.ravel() + self.intercept_[0]

    def predict_proba(self, X) -> np.ndarray:
        z = self.decision_function(X)
        p1 = 1.0 / (1.0 + np.exp(-z))
        return np.column_stack([1.0 - p1, p1])

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X)[:, 1] >= self.decision_threshold).astype(int)


class FrameAggregator(BaseEstimator, TransformerMixin):
    """Documents in, information frames out; the scorers carry the models."""

    def __init__(
        self,
        relevance: RelevanceScorer,
        redundancy: RedundancyScorer,
        provider: EmbeddingProvider,
        config: Optional[SieveConfig] = None,
        fail_fast: bool = True,
    ):
        self.relevance = relevance
        self.redundancy = redundancy
        self.provider = provider
        self.config = config
        self.fail_fast = fail_fast

    def fit(self, X: Sequence[Document], y=None):
        return self  # stateless: models arrive pre-trained via the scorers

    def transform(self, X: Sequence[Document]) -> List[InformationFrame]:
        frames, _, _ = aggregate_corpus(
            X,
            self.relevance,
            self.redundancy,
            self.provider,
            self.config or SieveConfig(),
            fail_fast=self.fail_fast,
        )
        return frames
