import json
import math

import httpx
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from argsieve.features import (
    EmbeddingProvider,
    EmbeddingProviderConfig,
    FeatureError,
    cosine,
    hashed_ngram_featurizer,
    load_embedding_store,
    remote_embed,
)


class TestCosine:
    def test_identical_direction(self):
        assert cosine([1.0, 0.0], [1.0, 0.0]) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine([1.0, 0.0], [0.0, 1.0]) == pytest.approx(0.0)

    def test_forty_five_degrees(self):
        assert cosine([1.0, 1.0], [1.0, 0.0]) == pytest.approx(1 / math.sqrt(2), abs=1e-9)

    def test_zero_vector_defined_as_zero(self):
        assert cosine([0.0, 0.0], [1.0, 2.0]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(FeatureError, match="mismatch"):
            cosine([1.0, 2.0], [1.0, 2.0, 3.0])

    @given(
        st.lists(st.floats(-100, 100), min_size=2, max_size=8),
        st.lists(st.floats(-100, 100), min_size=2, max_size=8),
    )
    def test_symmetric_and_bounded(self, a, b):
        n = min(len(a), len(b))
        a, b = np.array(a[:n]), np.array(b[:n])
        c = cosine(a, b)
        assert c == pytest.approx(cosine(b, a), abs=1e-12)
        assert abs(c) <= 1 + 1e-12

    @given(
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.floats(0.001, 1000),
    )
    def test_scale_invariance(self, a, alpha):
        a = np.array(a)
        # Exclude vectors so tiny that squaring underflows to zero; the
        # realistic input domain is unit-norm embeddings.
        assume(np.linalg.norm(a) == 0.0 or np.linalg.norm(a) > 1e-6)
        b = np.array([1.0, -2.0, 0.5])
        assert cosine(alpha * a, b) == pytest.approx(cosine(a, b), abs=1e-9)


class TestHashedNgram:
    def test_deterministic(self):
        v1 = hashed_ngram_featurizer("heavy rainfall", 64)
        v2 = hashed_ngram_featurizer("heavy rainfall", 64)
        assert np.array_equal(v1, v2)

    def test_unit_norm(self):
        v = hashed_ngram_featurizer("killed 41 people", 64)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-9)

    def test_disjoint_alphabets_not_fully_collided(self):
        c = cosine(hashed_ngram_featurizer("aaaa", 64), hashed_ngram_featurizer("zzzz", 64))
        assert c < 1.0

    def test_duplicated_text_high_cosine(self):
        # Repeating a text keeps the vector pointing the same way; the exact
        # value depends on the ngram mix (cross-boundary grams dilute it).
        a24 = hashed_ngram_featurizer("flood", 64, (2, 3, 4))
        b24 = hashed_ngram_featurizer("flood flood", 64, (2, 3, 4))
        assert cosine(a24, b24) > 0.8
        a23 = hashed_ngram_featurizer("flood", 64, (2, 3))
        b23 = hashed_ngram_featurizer("flood flood", 64, (2, 3))
        assert cosine(a23, b23) > 0.9

    def test_case_insensitive(self):
        assert np.array_equal(
            hashed_ngram_featurizer("Monday", 64), hashed_ngram_featurizer("monday", 64)
        )

    def test_dim_floor(self):
        with pytest.raises(FeatureError):
            hashed_ngram_featurizer("text", 4)


class TestProviderConfig:
    def test_defaults(self):
        cfg = EmbeddingProviderConfig()
        assert cfg.kind == "hashed-ngram" and cfg.dim == 64 and cfg.ngram_sizes == (2, 3, 4)

    def test_rejects_bad_ngram_sizes(self):
        with pytest.raises(FeatureError):
            EmbeddingProviderConfig(ngram_sizes=(1, 2))

    def test_rejects_small_dim(self):
        with pytest.raises(FeatureError):
            EmbeddingProviderConfig(dim=4)

    def test_rejects_unknown_kind(self):
        with pytest.raises(FeatureError):
            EmbeddingProviderConfig(kind="transformer")


class TestProvider:
    def test_embed_deterministic(self, provider):
        assert np.array_equal(provider.embed("heavy rain"), provider.embed("heavy rain"))

    def test_empty_text_rejected(self, provider):
        with pytest.raises(FeatureError, match="empty"):
            provider.embed("   ")

    def test_file_store_lookup_and_miss(self, tmp_path):
        store_path = tmp_path / "emb.jsonl"
        store_path.write_text(
            json.dumps({"key": "monday", "vector": [1.0] * 8})
            + "\n"
            + json.dumps({"key": "brevik", "vector": [0.5] * 8})
            + "\n",
            encoding="utf-8",
        )
        provider = EmbeddingProvider(
            EmbeddingProviderConfig(kind="file-store", dim=8, store_path=str(store_path))
        )
        assert np.array_equal(provider.embed("monday"), np.ones(8))
        with pytest.raises(FeatureError, match="tuesday"):
            provider.embed("tuesday")


class TestEmbeddingStore:
    def test_mixed_dims_rejected(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        path.write_text(
            json.dumps({"key": "a", "vector": [0.0] * 16})
            + "\n"
            + json.dumps({"key": "b", "vector": [0.0] * 32})
            + "\n",
            encoding="utf-8",
        )
        with pytest.raises(FeatureError, match="inconsistent"):
            load_embedding_store(path)

    def test_duplicate_key_rejected(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        rec = json.dumps({"key": "a", "vector": [0.0] * 8})
        path.write_text(rec + "\n" + rec + "\n", encoding="utf-8")
        with pytest.raises(FeatureError, match="duplicate"):
            load_embedding_store(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        path.write_text(
            json.dumps({"key": "a", "vector": [1.0, None, 0.0]}).replace("null", "NaN") + "\n",
            encoding="utf-8",
        )
        with pytest.raises(FeatureError, match="non-finite"):
            load_embedding_store(path)


def _mock_client(handler):
    return httpx.Client(transport=httpx.MockTransport(handler))


class TestRemoteEmbed:
    def test_order_and_count_preserved(self):
        def handler(request):
            texts = json.loads(request.content)["texts"]
            return httpx.Response(
                200, json={"vectors": [[float(i)] * 8 for i in range(len(texts))]}
            )

        vecs = remote_embed(["a", "b", "c"], "http://embedder/embed", client=_mock_client(handler))
        assert len(vecs) == 3
        assert np.array_equal(vecs[1], np.ones(8))

    def test_count_mismatch(self):
        def handler(request):
            return httpx.Response(200, json={"vectors": [[0.0] * 8, [0.0] * 8]})

        with pytest.raises(FeatureError, match="2 vectors for 3 texts"):
            remote_embed(["a", "b", "c"], "http://embedder/embed", client=_mock_client(handler))

    def test_nan_component_rejected(self):
        def handler(request):
            return httpx.Response(200, content=b'{"vectors": [[1.0, NaN]]}')

        with pytest.raises(FeatureError, match="non-finite"):
            remote_embed(["a"], "http://embedder/embed", client=_mock_client(handler))

    def test_transport_failure(self):
        def handler(request):
            raise httpx.ConnectError("refused")

        with pytest.raises(FeatureError, match="failed"):
            remote_embed(["a"], "http://embedder/embed", client=_mock_client(handler))
