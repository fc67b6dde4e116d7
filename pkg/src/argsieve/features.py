"""Embedding providers and the cosine-similarity primitive.

The graph ranking and the redundancy features only need *some* deterministic
text encoder with the "similar surface form -> high cosine" property. The
default is a hashed character n-gram featurizer; precomputed vectors can be
served from a jsonl store, and an external encoder can be plugged in over a
one-endpoint HTTP protocol.
"""

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import httpx
import numpy as np


class FeatureError(ValueError):
    """Provider misuse or protocol violation."""


VALID_NGRAM_SIZES = {2, 3, 4, 5}


@dataclass(frozen=True)
class EmbeddingProviderConfig:
    kind: str = "hashed-ngram"  # hashed-ngram | file-store | remote
    dim: int = 64
    ngram_sizes: Tuple[int, ...] = (2, 3, 4)
    store_path: Optional[str] = None
    endpoint: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("hashed-ngram", "file-store", "remote"):
            raise FeatureError(f"unknown provider kind: {self.kind!r}")
        if self.dim < 8:
            raise FeatureError("embedding dim must be >= 8")
        if self.kind == "hashed-ngram" and not set(self.ngram_sizes) <= VALID_NGRAM_SIZES:
            raise FeatureError(f"ngram sizes must be within {sorted(VALID_NGRAM_SIZES)}")
        if self.kind == "file-store" and not self.store_path:
            raise FeatureError("file-store provider requires store_path")
        if self.kind == "remote" and not self.endpoint:
            raise FeatureError("remote provider requires endpoint")


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise FeatureError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        # Zero vectors are defined to have similarity 0 so NaNs never reach
        # the graph weights.
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def _stable_hash(data: str) -> int:
    return int.from_bytes(hashlib.blake2b(data.encode("utf-8"), digest_size=8).digest(), "big")


def hashed_ngram_featurizer(
    text: str, dim: int, ngram_sizes: Sequence[int] = (2, 3, 4)
) -> np.ndarray:
    """Signed hashed character n-gram counts, L2-normalized.

    Deterministic across processes (blake2b, not the randomized builtin hash).
    """
    if dim < 8:
        raise FeatureError("embedding dim must be >= 8")
    vec = np.zeros(dim, dtype=float)
    s = text.lower()
    for n in ngram_sizes:
        for i in range(len(s) - n + 1):
            h = _stable_hash(f"{n}:{s[i : i + n]}")
            sign = 1.0 if h & 1 else -1.0
            vec[(h >> 1) % dim] += sign
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


class EmbeddingProvider:
    """Deterministic text -> vector function, fixed dim per session."""

    def __init__(self, config: EmbeddingProviderConfig):
        self.config = config
        self._cache: Dict[str, np.ndarray] = {}
        self._store: Optional[Dict[str, np.ndarray]] = None
        self._client: Optional[httpx.Client] = None
        if config.kind == "file-store":
            self._store = load_embedding_store(config.store_path)
            for v in self._store.values():
                if v.shape[0] != config.dim:
                    raise FeatureError(
                        f"store dim {v.shape[0]} does not match configured dim {config.dim}"
                    )
                break

    @property
    def dim(self) -> int:
        return self.config.dim

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise FeatureError("cannot embed empty text")
        cached = self._cache.get(text)
        if cached is not None:
            return cached
        kind = self.config.kind
        if kind == "hashed-ngram":
            vec = hashed_ngram_featurizer(text, self.config.dim, self.config.ngram_sizes)
        elif kind == "file-store":
            if text not in self._store:
                raise FeatureError(f"embedding store miss for key {text!r}")
            vec = self._store[text]
        else:
            vec = self.embed_batch([text])[0]
        self._cache[text] = vec
        return vec

    def embed_batch(self, texts: List[str]) -> List[np.ndarray]:
        for t in texts:
            if not t.strip():
                raise FeatureError("cannot embed empty text")
        if self.config.kind != "remote":
            return [self.embed(t) for t in texts]
        if self._client is None:
            self._client = httpx.Client()
        return remote_embed(texts, self.config.endpoint, client=self._client)


def embed_text(text: str, provider: EmbeddingProvider) -> np.ndarray:
    return provider.embed(text)


def load_embedding_store(path) -> Dict[str, np.ndarray]:
    """Load {"key","vector"} jsonl records into a lookup table."""
    store: Dict[str, np.ndarray] = {}
    dim = None
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            key = obj["key"]
            vec = np.asarray(obj["vector"], dtype=float)
            if not np.all(np.isfinite(vec)):
                raise FeatureError(f"{path}:{lineno}: non-finite component for key {key!r}")
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise FeatureError(
                    f"{path}:{lineno}: dim {vec.shape[0]} inconsistent with {dim}"
                )
            if key in store:
                raise FeatureError(f"{path}:{lineno}: duplicate key {key!r}")
            store[key] = vec
    return store


def remote_embed(
    texts: List[str], endpoint: str, client: Optional[httpx.Client] = None
) -> List[np.ndarray]:
    """Batched POST /embed round trip; validates count, order and finiteness."""
    own_client = client is None
    if own_client:
        client = httpx.Client()
    try:
        try:
            resp = client.post(endpoint, json={"texts": texts})
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise FeatureError(f"remote embedder failed: {exc}") from exc
        body = resp.json()
        vectors = body.get("vectors")
        if vectors is None or len(vectors) != len(texts):
            got = 0 if vectors is None else len(vectors)
            raise FeatureError(
                f"remote embedder returned {got} vectors for {len(texts)} texts"
            )
        out = []
        for vec in vectors:
            arr = np.asarray(vec, dtype=float)
            if not np.all(np.isfinite(arr)):
                raise FeatureError("remote embedder returned non-finite components")
            out.append(arr)
        return out
    finally:
        if own_client:
            client.close()
