import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from argsieve.corpus import ArgumentType
from argsieve.estimators import (
    FrameAggregator,
    SGDLogisticClassifier,
    check_binary_targets,
    check_feature_matrix,
)
from argsieve.sieve import LookupRedundancyScorer, LookupRelevanceScorer, aggregate_corpus
from argsieve.synthetic import GeneratorConfig, generate_synthetic_corpus

T = ArgumentType


def _separable(seed=0, n=40):
    rng = np.random.default_rng(seed)
    X = np.vstack(
        [rng.normal([2.0, 2.0], 0.3, size=(n // 2, 2)), rng.normal([-2.0, -2.0], 0.3, size=(n // 2, 2))]
    )
    y = np.array([1] * (n // 2) + [0] * (n // 2))
    return X, y


class TestValidationHelpers:
    def test_rejects_1d(self):
        with pytest.raises(ValueError, match="2d"):
            check_feature_matrix([1.0, 2.0])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="non-finite"):
            check_feature_matrix([[1.0, np.nan]])

    def test_rejects_non_binary_targets(self):
        with pytest.raises(ValueError, match="binary"):
            check_binary_targets([0, 1, 2], 3)

    def test_rejects_wrong_length(self):
        with pytest.raises(ValueError):
            check_binary_targets([0, 1], 3)


class TestSGDLogisticClassifier:
    def test_fit_predict_separable(self):
        X, y = _separable()
        clf = SGDLogisticClassifier(learning_rate=0.5, epochs=200, seed=0)
        clf.fit(X, y)
        assert np.array_equal(clf.predict(X), y)

    def test_predict_proba_shape_and_sums(self):
        X, y = _separable()
        clf = SGDLogisticClassifier(epochs=50).fit(X, y)
        proba = clf.predict_proba(X)
        assert proba.shape == (len(X), 2)
        assert np.allclose(proba.sum(axis=1), 1.0)

    def test_not_fitted_error(self):
        with pytest.raises(NotFittedError):
            SGDLogisticClassifier().predict(np.zeros((1, 2)))

    def test_get_set_params_round_trip(self):
        clf = SGDLogisticClassifier(learning_rate=0.2, epochs=7)
        params = clf.get_params()
        assert params["learning_rate"] == 0.2 and params["epochs"] == 7
        clf.set_params(epochs=9)
        assert clf.epochs == 9

    def test_clone_preserves_params(self):
        clf = SGDLogisticClassifier(learning_rate=0.3, seed=5)
        cloned = clone(clf)
        assert cloned.get_params() == clf.get_params()

    def test_seed_reproducibility(self):
        X, y = _separable(seed=2)
        a = SGDLogisticClassifier(epochs=30, seed=9).fit(X, y)
        b = SGDLogisticClassifier(epochs=30, seed=9).fit(X, y)
        assert np.array_equal(a.coef_, b.coef_) and a.intercept_ == b.intercept_

    def test_feature_count_mismatch(self):
        X, y = _separable()
        clf = SGDLogisticClassifier(epochs=10).fit(X, y)
        with pytest.raises(ValueError, match="features"):
            clf.predict(np.zeros((2, 5)))


class TestFrameAggregator:
    def test_transform_matches_pipeline(self, provider):
        corpus = generate_synthetic_corpus(GeneratorConfig(seed=8, n_docs=8), provider)
        relevance = LookupRelevanceScorer(corpus.relevance_lookup())
        redundancy = LookupRedundancyScorer(corpus.cluster_of)
        agg = FrameAggregator(relevance, redundancy, provider)
        frames = agg.fit(corpus.documents).transform(corpus.documents)
        expected, _, _ = aggregate_corpus(corpus.documents, relevance, redundancy, provider)
        assert frames == expected

    def test_cloneable(self, provider):
        agg = FrameAggregator(LookupRelevanceScorer({}), LookupRedundancyScorer({}), provider)
        cloned = clone(agg)
        assert cloned.get_params()["provider"].dim == provider.dim
        assert cloned.get_params()["fail_fast"] == agg.fail_fast
